#pragma once

#include <cstdint>
#include <vector>

#include "hazardlab/metrics.hpp"
#include "hazardlab/survival.hpp"

namespace hazardlab {

struct StratSearchConfig {
  std::vector<double> candidate_limits;  // ascending, in (0, 1)
  int group_count_min = 2;
  int group_count_max = 8;
  LogRankConfig logrank;
  std::uint64_t max_combinations = 200000;  // enumeration safety cap

  void validate() const;
};

struct StratificationReport {
  RiskGroupBoundaries boundaries;
  std::vector<int> group_sizes;
  std::vector<KMCurve> km_curves;             // one per group; empty groups get empty curves
  std::vector<double> adjacent_pvalues;       // group i vs i+1
  std::vector<int> empty_groups;              // flagged indices
  int passes = 0;                             // adjacent tests with p < significance
};

/// Assigns groups, fits a Kaplan-Meier curve per group and tests every
/// adjacent pair with the weighted log-rank. Pairs touching an empty group
/// score p = 1 by convention.
StratificationReport stratify_and_test(const std::vector<double>& risks,
                                       const std::vector<double>& times,
                                       const std::vector<std::uint8_t>& censored,
                                       const RiskGroupBoundaries& boundaries,
                                       const LogRankConfig& cfg);

struct SearchEntry {
  std::vector<double> limits;
  int train_passes = 0;
  int val_passes = 0;
  double imbalance = 0.0;  // max/min occupied group size on the training split
};

struct SearchResult {
  RiskGroupBoundaries best;
  std::vector<SearchEntry> log;  // every combination evaluated, in enumeration order
};

/// Enumerates boundary subsets of the candidate list per group count (largest
/// count first) and scores lexicographically: training passes, then validation
/// passes, then minimal group-size imbalance.
SearchResult search_boundaries(const std::vector<double>& risks_train,
                               const std::vector<double>& times_train,
                               const std::vector<std::uint8_t>& censored_train,
                               const std::vector<double>& risks_val,
                               const std::vector<double>& times_val,
                               const std::vector<std::uint8_t>& censored_val,
                               const StratSearchConfig& cfg);

}  // namespace hazardlab
