#include "hazardlab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "hazardlab/errors.hpp"

namespace hazardlab::num {

namespace {

// Lower incomplete gamma by power series, valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma by Lentz continued fraction, valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || !std::isfinite(x))
    raise(ErrorKind::numeric, "gamma_p requires a > 0 and finite x >= 0");
  if (x == 0.0) return 0.0;
  return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || !std::isfinite(x))
    raise(ErrorKind::numeric, "gamma_q requires a > 0 and finite x >= 0");
  if (x == 0.0) return 1.0;
  return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi2_sf(double statistic, double dof) {
  if (!(dof > 0.0)) raise(ErrorKind::numeric, "chi2_sf requires dof > 0");
  if (statistic <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * statistic);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

MannWhitneyResult mann_whitney_greater(std::span<const double> a, std::span<const double> b) {
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  if (na == 0 || nb == 0)
    raise(ErrorKind::insufficient_data, "mann_whitney requires two non-empty samples");

  struct Obs {
    double value;
    bool from_a;
  };
  std::vector<Obs> pooled;
  pooled.reserve(na + nb);
  for (double v : a) pooled.push_back({v, true});
  for (double v : b) pooled.push_back({v, false});
  std::sort(pooled.begin(), pooled.end(),
            [](const Obs& x, const Obs& y) { return x.value < y.value; });

  // midranks with tie bookkeeping
  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].value == pooled[i].value) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);  // average of ranks i+1..j
    const auto t = static_cast<double>(j - i);
    if (t > 1.0) tie_term += t * t * t - t;
    for (std::size_t r = i; r < j; ++r)
      if (pooled[r].from_a) rank_sum_a += mid;
    i = j;
  }

  const double nad = static_cast<double>(na);
  const double nbd = static_cast<double>(nb);
  const double n = nad + nbd;
  const double u = rank_sum_a - nad * (nad + 1.0) / 2.0;
  const double mean_u = nad * nbd / 2.0;
  const double var_u = nad * nbd / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));

  MannWhitneyResult out;
  out.u_statistic = u;
  if (var_u <= 0.0) {  // all observations tied
    out.z = 0.0;
    out.p_one_sided = 0.5;
    return out;
  }
  out.z = (u - mean_u - 0.5) / std::sqrt(var_u);  // continuity-corrected
  out.p_one_sided = normal_sf(out.z);
  return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

int thread_budget() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("HAZARDLAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) hw = std::min(hw, cap);
  }
  return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const int budget = std::min<std::size_t>(thread_budget(), n);
  if (budget <= 1) {
    fn(0, n);
    return;
  }
  // fixed chunking: ceil(n / budget) per worker
  const std::size_t chunk = (n + budget - 1) / budget;
  std::vector<std::thread> workers;
  workers.reserve(budget - 1);
  std::size_t begin = chunk;
  for (int w = 1; w < budget && begin < n; ++w) {
    const std::size_t end = std::min(n, begin + chunk);
    workers.emplace_back(fn, begin, end);
    begin = end;
  }
  fn(0, std::min(n, chunk));
  for (auto& t : workers) t.join();
}

}  // namespace hazardlab::num
