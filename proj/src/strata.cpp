#include "hazardlab/strata.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hazardlab/errors.hpp"
#include "hazardlab/numeric.hpp"

namespace hazardlab {

namespace {

std::vector<std::vector<std::size_t>> group_members(const std::vector<double>& risks,
                                                    const RiskGroupBoundaries& boundaries) {
  std::vector<std::vector<std::size_t>> members(boundaries.group_count());
  for (std::size_t i = 0; i < risks.size(); ++i)
    members[assign_risk_group(RiskScore{risks[i]}, boundaries)].push_back(i);
  return members;
}

// (train_passes, val_passes, -imbalance) lexicographic, higher is better
bool better(const SearchEntry& a, const SearchEntry& b) {
  if (a.train_passes != b.train_passes) return a.train_passes > b.train_passes;
  if (a.val_passes != b.val_passes) return a.val_passes > b.val_passes;
  return a.imbalance < b.imbalance;
}

double size_imbalance(const std::vector<int>& sizes) {
  int lo = std::numeric_limits<int>::max();
  int hi = 0;
  for (int s : sizes) {
    if (s == 0) continue;
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return lo == std::numeric_limits<int>::max() ? 0.0
                                               : static_cast<double>(hi) / static_cast<double>(lo);
}

int count_passes(const std::vector<double>& risks, const std::vector<double>& times,
                 const std::vector<std::uint8_t>& censored, const RiskGroupBoundaries& boundaries,
                 const LogRankConfig& cfg) {
  const auto members = group_members(risks, boundaries);
  int passes = 0;
  for (std::size_t g = 0; g + 1 < members.size(); ++g) {
    const auto& a = members[g];
    const auto& b = members[g + 1];
    if (a.empty() || b.empty()) continue;  // counts as failed
    std::vector<double> ta, tb;
    std::vector<std::uint8_t> ca, cb;
    for (std::size_t i : a) ta.push_back(times[i]), ca.push_back(censored[i]);
    for (std::size_t i : b) tb.push_back(times[i]), cb.push_back(censored[i]);
    try {
      if (logrank_fh(ta, ca, tb, cb, cfg).pvalue < cfg.significance) ++passes;
    } catch (const Error&) {
      // no events in the pooled pair: cannot separate, counts as failed
    }
  }
  return passes;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  std::uint64_t acc = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    // n - r + i <= 64 candidates in practice; overflow is not a concern here
    acc = acc * (n - r + i) / i;
  }
  return acc;
}

}  // namespace

void StratSearchConfig::validate() const {
  double prev = 0.0;
  for (double c : candidate_limits) {
    if (!(c > prev) || !(c < 1.0))
      raise(ErrorKind::config, "candidate limits must be ascending within (0, 1)");
    prev = c;
  }
  if (group_count_min < 2) raise(ErrorKind::config, "group_count_min must be >= 2");
  if (group_count_max < group_count_min)
    raise(ErrorKind::config, "group_count_max must be >= group_count_min");
}

StratificationReport stratify_and_test(const std::vector<double>& risks,
                                       const std::vector<double>& times,
                                       const std::vector<std::uint8_t>& censored,
                                       const RiskGroupBoundaries& boundaries,
                                       const LogRankConfig& cfg) {
  if (risks.empty()) raise(ErrorKind::insufficient_data, "empty cohort");
  if (risks.size() != times.size() || times.size() != censored.size())
    raise(ErrorKind::invalid_input, "risks, times and censor flags differ in length");

  StratificationReport report;
  report.boundaries = boundaries;
  const auto members = group_members(risks, boundaries);
  const int groups = boundaries.group_count();
  report.group_sizes.resize(groups);
  report.km_curves.resize(groups);
  for (int g = 0; g < groups; ++g) {
    report.group_sizes[g] = static_cast<int>(members[g].size());
    if (members[g].empty()) {
      report.empty_groups.push_back(g);
      continue;
    }
    std::vector<double> t;
    std::vector<std::uint8_t> c;
    for (std::size_t i : members[g]) t.push_back(times[i]), c.push_back(censored[i]);
    report.km_curves[g] = kaplan_meier(t, c);
  }

  report.adjacent_pvalues.resize(groups - 1, 1.0);
  for (int g = 0; g + 1 < groups; ++g) {
    if (members[g].empty() || members[g + 1].empty()) continue;  // p = 1 by convention
    std::vector<double> ta, tb;
    std::vector<std::uint8_t> ca, cb;
    for (std::size_t i : members[g]) ta.push_back(times[i]), ca.push_back(censored[i]);
    for (std::size_t i : members[g + 1]) tb.push_back(times[i]), cb.push_back(censored[i]);
    try {
      report.adjacent_pvalues[g] = logrank_fh(ta, ca, tb, cb, cfg).pvalue;
    } catch (const Error&) {
      report.adjacent_pvalues[g] = 1.0;  // no events in the pooled pair
    }
  }
  for (double p : report.adjacent_pvalues)
    if (p < cfg.significance) ++report.passes;
  return report;
}

SearchResult search_boundaries(const std::vector<double>& risks_train,
                               const std::vector<double>& times_train,
                               const std::vector<std::uint8_t>& censored_train,
                               const std::vector<double>& risks_val,
                               const std::vector<double>& times_val,
                               const std::vector<std::uint8_t>& censored_val,
                               const StratSearchConfig& cfg) {
  cfg.validate();
  if (risks_train.empty() || risks_val.empty())
    raise(ErrorKind::insufficient_data, "empty split");

  std::vector<double> candidates = cfg.candidate_limits;
  std::sort(candidates.begin(), candidates.end());  // canonical order
  const auto n_cand = static_cast<std::uint64_t>(candidates.size());
  const int max_groups =
      std::min<int>(cfg.group_count_max, static_cast<int>(n_cand) + 1);
  if (max_groups < cfg.group_count_min)
    raise(ErrorKind::config, "candidate pool too small for the requested group counts");

  std::uint64_t total = 0;
  for (int g = cfg.group_count_min; g <= max_groups; ++g)
    total += binomial(n_cand, static_cast<std::uint64_t>(g - 1));
  if (total > cfg.max_combinations)
    raise(ErrorKind::config,
          "boundary search would enumerate " + std::to_string(total) +
              " combinations (cap " + std::to_string(cfg.max_combinations) +
              "); coarsen the candidate grid or narrow the group range");

  // enumerate every combination, largest group count first
  std::vector<std::vector<double>> combos;
  combos.reserve(total);
  for (int g = max_groups; g >= cfg.group_count_min; --g) {
    const int choose = g - 1;
    std::vector<int> idx(choose);
    for (int i = 0; i < choose; ++i) idx[i] = i;
    while (true) {
      std::vector<double> limits(choose);
      for (int i = 0; i < choose; ++i) limits[i] = candidates[idx[i]];
      combos.push_back(std::move(limits));
      int i = choose - 1;
      while (i >= 0 && idx[i] == static_cast<int>(n_cand) - choose + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < choose; ++j) idx[j] = idx[j - 1] + 1;
    }
  }

  SearchResult result;
  result.log.resize(combos.size());
  num::parallel_for(combos.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      SearchEntry entry;
      entry.limits = combos[i];
      const auto boundaries = RiskGroupBoundaries::from_limits(combos[i]);
      entry.train_passes =
          count_passes(risks_train, times_train, censored_train, boundaries, cfg.logrank);
      entry.val_passes = count_passes(risks_val, times_val, censored_val, boundaries, cfg.logrank);
      std::vector<int> sizes(boundaries.group_count(), 0);
      for (double r : risks_train) ++sizes[assign_risk_group(RiskScore{r}, boundaries)];
      entry.imbalance = size_imbalance(sizes);
      result.log[i] = std::move(entry);
    }
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.log.size(); ++i)
    if (better(result.log[i], result.log[best])) best = i;
  result.best = RiskGroupBoundaries::from_limits(result.log[best].limits);
  return result;
}

}  // namespace hazardlab
