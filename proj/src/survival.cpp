#include "hazardlab/survival.hpp"

#include <algorithm>
#include <cmath>

#include "hazardlab/errors.hpp"

namespace hazardlab {

TimeGrid TimeGrid::uniform(int interval_count, double interval_length) {
  if (interval_count < 1) raise(ErrorKind::invalid_input, "interval_count must be >= 1");
  if (!(interval_length > 0.0) || !std::isfinite(interval_length))
    raise(ErrorKind::invalid_input, "interval_length must be positive and finite");
  std::vector<double> b(interval_count);
  for (int j = 0; j < interval_count; ++j) b[j] = interval_length * (j + 1);
  return from_boundaries(std::move(b));
}

TimeGrid TimeGrid::from_boundaries(std::vector<double> boundaries) {
  if (boundaries.empty()) raise(ErrorKind::invalid_input, "time grid needs >= 1 boundary");
  double prev = 0.0;
  for (double t : boundaries) {
    if (!std::isfinite(t) || t <= prev)
      raise(ErrorKind::invalid_input, "grid boundaries must be strictly increasing and > 0");
    prev = t;
  }
  TimeGrid grid;
  grid.boundaries = std::move(boundaries);
  return grid;
}

void SubjectRecord::validate() const {
  if (!std::isfinite(observed_time) || observed_time < 0.0)
    raise(ErrorKind::invalid_input, "subject " + id + ": observed_time must be finite and >= 0");
  if (bag.empty()) raise(ErrorKind::invalid_input, "subject " + id + ": bag must be non-empty");
  const std::size_t d = bag.front().size();
  for (const auto& x : bag)
    if (x.size() != d)
      raise(ErrorKind::invalid_input, "subject " + id + ": instances differ in dimension");
  if (instance_labels && instance_labels->size() != bag.size())
    raise(ErrorKind::invalid_input, "subject " + id + ": instance_labels length mismatch");
  if (true_risk && (!(*true_risk >= 0.0) || !(*true_risk <= 1.0)))
    raise(ErrorKind::invalid_input, "subject " + id + ": true_risk outside [0, 1]");
}

RiskGroupBoundaries RiskGroupBoundaries::from_limits(std::vector<double> limits) {
  double prev = 0.0;
  for (double v : limits) {
    if (!(v > prev) || !(v < 1.0))
      raise(ErrorKind::invalid_input, "risk-group limits must be strictly ascending within (0, 1)");
    prev = v;
  }
  RiskGroupBoundaries b;
  b.limits = std::move(limits);
  return b;
}

DiscreteLabel discretize_label(double t_star, bool censored, const TimeGrid& grid) {
  if (!std::isfinite(t_star) || t_star < 0.0)
    raise(ErrorKind::invalid_input, "t_star must be finite and >= 0");
  const int k = grid.interval_count();
  DiscreteLabel label;
  label.censored = censored;
  label.survival_indicator.assign(k, 0);
  int event_interval = k;
  for (int j = 0; j < k; ++j) {
    if (grid.boundaries[j] < t_star) {
      label.survival_indicator[j] = 1;
    } else {
      event_interval = j;
      break;
    }
  }
  label.event_interval = event_interval;
  return label;
}

void validate_hazard(const HazardCurve& hazard) {
  if (hazard.values.empty()) raise(ErrorKind::invalid_input, "hazard curve is empty");
  for (double h : hazard.values)
    if (!(h >= 0.0) || !(h <= 1.0))
      raise(ErrorKind::invalid_input, "hazard entries must lie in [0, 1]");
}

void validate_survival(const SurvivalCurve& survival) {
  if (survival.values.empty()) raise(ErrorKind::invalid_input, "survival curve is empty");
  double prev = 1.0;
  for (double s : survival.values) {
    if (!(s >= 0.0) || !(s <= 1.0))
      raise(ErrorKind::invalid_input, "survival entries must lie in [0, 1]");
    if (s > prev) raise(ErrorKind::invalid_input, "survival curve must be non-increasing");
    prev = s;
  }
}

SurvivalCurve survival_from_hazard(const HazardCurve& hazard) {
  validate_hazard(hazard);
  SurvivalCurve s;
  s.values.resize(hazard.values.size());
  double acc = 1.0;
  for (std::size_t j = 0; j < hazard.values.size(); ++j) {
    acc *= 1.0 - hazard.values[j];
    s.values[j] = acc;
  }
  return s;
}

RiskScore risk_score(const SurvivalCurve& survival, const TimeGrid& grid) {
  validate_survival(survival);
  if (static_cast<int>(survival.values.size()) != grid.interval_count())
    raise(ErrorKind::invalid_input, "survival curve length does not match grid");
  double area = 0.0;
  double prev_t = 0.0;
  for (int j = 0; j < grid.interval_count(); ++j) {
    area += survival.values[j] * (grid.boundaries[j] - prev_t);
    prev_t = grid.boundaries[j];
  }
  return RiskScore{1.0 - area / grid.horizon()};
}

int assign_risk_group(RiskScore risk, const RiskGroupBoundaries& boundaries) {
  // group index == number of limits <= r (lower-inclusive half-open intervals)
  int group = 0;
  for (double limit : boundaries.limits)
    if (risk.value >= limit) ++group;
  return group;
}

}  // namespace hazardlab
