#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hazardlab/survival.hpp"

namespace hazardlab {

/// Knobs of the synthetic generator. Each subject draws a malignant fraction
/// f; its constant per-interval hazard is clamp(base_hazard * exp(risk_effect
/// * f), 0, 0.99), and true_risk = f.
struct CohortConfig {
  int subject_count = 2000;
  int bag_size = 16;
  int feature_dim = 8;
  double malignant_fraction_lo = 0.0;
  double malignant_fraction_hi = 1.0;
  double base_hazard = 0.012;
  double risk_effect = 1.5;
  double censor_fraction_target = 0.8;
  double admin_censor_time = 84.0;
  double signal_magnitude = 2.0;  // mean shift of malignant instances along a unit direction
  std::uint64_t seed = 0;

  void validate() const;
};

/// The generating hazard law plus each subject's true risk; the Bayes-correct
/// reference model for metric tests.
struct OracleModel {
  double base_hazard = 0.012;
  double risk_effect = 1.5;
  std::vector<double> true_risk;

  HazardCurve hazard_for(double fraction, const TimeGrid& grid) const;
};

std::pair<std::vector<SubjectRecord>, OracleModel> generate_cohort(const CohortConfig& cfg,
                                                                   const TimeGrid& grid);

/// Bayes-correct survival curves for each subject of a generated cohort.
std::vector<SurvivalCurve> oracle_predictions(const std::vector<SubjectRecord>& cohort,
                                              const OracleModel& oracle, const TimeGrid& grid);

/// Evaluation-only bags: half pure-benign, half pure-malignant instances with
/// instance labels set. Never part of a training cohort.
std::vector<SubjectRecord> generate_stitched_bags(const CohortConfig& cfg, int count);

/// Unit-norm direction of the malignant mean shift for dimension d.
std::vector<double> malignant_signal_direction(int feature_dim);

}  // namespace hazardlab
