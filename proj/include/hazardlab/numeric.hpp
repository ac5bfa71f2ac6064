#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace hazardlab::num {

inline constexpr std::string_view kVersion = "0.1.0";

/// Regularized lower incomplete gamma P(a, x), series/continued-fraction form.
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi2_sf(double statistic, double dof);

/// Upper tail of the standard normal distribution.
double normal_sf(double z);

struct MannWhitneyResult {
  double u_statistic = 0.0;  // U for sample a
  double z = 0.0;
  double p_one_sided = 1.0;  // H1: a stochastically greater than b
};

/// Rank-sum test with tie correction and continuity correction,
/// normal approximation. One-sided alternative "a > b".
MannWhitneyResult mann_whitney_greater(std::span<const double> a, std::span<const double> b);

/// splitmix64 scramble, used to derive independent per-stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// FNV-1a 64-bit hash (provenance stamps in CSV output).
std::uint64_t fnv1a64(std::string_view text);

/// Deterministic random source. One instance per logical stream; derive
/// per-subject streams with mix_seed so parallel and serial runs agree.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double gaussian() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  std::uint64_t integer(std::uint64_t n) {  // uniform in [0, n)
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Number of worker threads: min(hardware, HAZARDLAB_THREADS when set).
int thread_budget();

/// Runs fn(begin, end) over a chunked partition of [0, n). Chunk layout is
/// independent of the thread budget, so results are reproducible as long as
/// chunks write disjoint outputs.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace hazardlab::num
