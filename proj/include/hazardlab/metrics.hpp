#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hazardlab/survival.hpp"

namespace hazardlab {

/// Product-limit estimate. `event_times` holds the distinct times with at
/// least one event; `survival` and `at_risk` are aligned with it.
struct KMCurve {
  std::vector<double> event_times;
  std::vector<double> survival;
  std::vector<int> at_risk;

  /// Right-continuous step evaluation S(t).
  double survival_at(double t) const;
  /// Left limit S(t-).
  double survival_before(double t) const;
};

struct LogRankConfig {
  double fh_p = 1.0;  // Fleming-Harrington exponent on S(t-)
  double fh_q = 1.0;  // exponent on 1 - S(t-); p = q = 0 is the classic test
  double significance = 0.05;
};

struct CdAucResult {
  double integrated = 0.0;
  std::vector<std::pair<double, double>> over_time;  // (t, AUC(t)) at evaluable times
};

struct DCalibrationResult {
  double statistic = 0.0;
  double pvalue = 1.0;
  std::vector<double> histogram;
};

struct LogRankResult {
  double statistic = 0.0;
  double pvalue = 1.0;
};

struct MetricsReport {
  double integrated_cd_auc = 0.0;
  std::vector<std::pair<double, double>> auc_over_time;
  double brier = 0.0;
  double c_index = 0.0;
  double dcal_statistic = 0.0;
  double dcal_pvalue = 1.0;
  bool dcal_pass = true;
};

KMCurve kaplan_meier(const std::vector<double>& times, const std::vector<std::uint8_t>& censored);

/// Cumulative/dynamic AUC at every grid time with at least one case and one
/// control, IPCW-weighted by the censoring-distribution Kaplan-Meier estimate;
/// integrated across time with weights from the event-time distribution
/// estimate (Kaplan-Meier mass per interval), renormalized over evaluable times.
CdAucResult cd_auc(const std::vector<SurvivalCurve>& curves,
                   const std::vector<DiscreteLabel>& labels, const TimeGrid& grid);

/// Concordant fraction over admissible pairs (t_i < t_j, i uncensored),
/// 0.5 credit for risk ties.
double harrell_cindex(const std::vector<RiskScore>& risks, const std::vector<double>& times,
                      const std::vector<std::uint8_t>& censored);

/// IPCW-weighted integrated Brier score over the grid, normalized by t_k.
double brier(const std::vector<SurvivalCurve>& curves, const std::vector<DiscreteLabel>& labels,
             const TimeGrid& grid);

/// Chi-square uniformity test of predicted survival probabilities at observed
/// times. Censored subjects spread their residual mass uniformly below
/// S(t_censor).
DCalibrationResult d_calibration(const std::vector<SurvivalCurve>& curves,
                                 const std::vector<DiscreteLabel>& labels, const TimeGrid& grid,
                                 int bins = 10);

/// Fleming-Harrington weighted log-rank test, chi-square with 1 dof.
LogRankResult logrank_fh(const std::vector<double>& times_a,
                         const std::vector<std::uint8_t>& censored_a,
                         const std::vector<double>& times_b,
                         const std::vector<std::uint8_t>& censored_b, const LogRankConfig& cfg);

MetricsReport evaluate_predictions(const std::vector<SurvivalCurve>& curves,
                                   const std::vector<RiskScore>& risks,
                                   const std::vector<DiscreteLabel>& labels, const TimeGrid& grid,
                                   int dcal_bins = 10, double significance = 0.05);

}  // namespace hazardlab
