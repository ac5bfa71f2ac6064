#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hazardlab {

/// Discretization of follow-up time into k intervals with right boundaries
/// t_1 < t_2 < ... < t_k (months). Interval j (0-based) covers (t_j, t_{j+1}]
/// with t_0 = 0.
struct TimeGrid {
  std::vector<double> boundaries;

  static TimeGrid uniform(int interval_count = 28, double interval_length = 3.0);
  static TimeGrid from_boundaries(std::vector<double> boundaries);

  int interval_count() const { return static_cast<int>(boundaries.size()); }
  double horizon() const { return boundaries.back(); }
};

/// One patient: a bag of instance feature vectors plus outcome.
/// `instance_labels` (per-instance malignant flag) and `true_risk` exist only
/// for synthetic or annotated cohorts.
struct SubjectRecord {
  std::string id;
  double observed_time = 0.0;
  bool censored = false;
  std::vector<std::vector<double>> bag;
  std::optional<std::vector<std::uint8_t>> instance_labels;
  std::optional<double> true_risk;

  int feature_dim() const { return bag.empty() ? 0 : static_cast<int>(bag.front().size()); }
  void validate() const;
};

/// Supervision vector for one subject. survival_indicator[j] = 1 iff t_j < t*,
/// a non-increasing prefix of ones; event_interval in [0, k] with k meaning
/// "beyond the grid".
struct DiscreteLabel {
  std::vector<std::uint8_t> survival_indicator;
  int event_interval = 0;
  bool censored = false;
};

struct HazardCurve {
  std::vector<double> values;  // per-interval conditional event probabilities
};

struct SurvivalCurve {
  std::vector<double> values;  // monotone non-increasing, in [0, 1]
};

struct RiskScore {
  double value = 0.0;  // in [0, 1]
};

/// Ascending risk-group interval limits in (0, 1); group count = limits.size()+1.
struct RiskGroupBoundaries {
  std::vector<double> limits;

  static RiskGroupBoundaries from_limits(std::vector<double> limits);
  int group_count() const { return static_cast<int>(limits.size()) + 1; }
};

DiscreteLabel discretize_label(double t_star, bool censored, const TimeGrid& grid);

/// S[j] = prod_{i<=j} (1 - h[i]); monotone non-increasing by construction.
SurvivalCurve survival_from_hazard(const HazardCurve& hazard);

/// r = 1 - (1/t_k) * sum_i S(t_i) * (t_i - t_{i-1}), with t_0 = 0.
RiskScore risk_score(const SurvivalCurve& survival, const TimeGrid& grid);

/// Half-open, lower-inclusive intervals: group i covers [limits[i-1], limits[i]).
int assign_risk_group(RiskScore risk, const RiskGroupBoundaries& boundaries);

void validate_hazard(const HazardCurve& hazard);
void validate_survival(const SurvivalCurve& survival);

}  // namespace hazardlab
