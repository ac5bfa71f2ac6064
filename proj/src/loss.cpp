#include "hazardlab/loss.hpp"

#include <algorithm>
#include <cmath>

#include "hazardlab/errors.hpp"

namespace hazardlab {

namespace {

void check_inputs(const HazardCurve& hazard, const DiscreteLabel& label, const LossConfig& cfg) {
  validate_hazard(hazard);
  const int k = static_cast<int>(hazard.values.size());
  if (static_cast<int>(label.survival_indicator.size()) != k)
    raise(ErrorKind::invalid_input, "label and hazard grid lengths differ");
  if (label.event_interval < 0 || label.event_interval > k)
    raise(ErrorKind::invalid_input, "event_interval outside [0, k]");
  if (!label.censored && label.event_interval == k)
    raise(ErrorKind::unsupported_label, "uncensored event beyond the grid");
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0))
    raise(ErrorKind::invalid_input, "alpha must lie in [0, 1]");
  if (!(cfg.epsilon > 0.0)) raise(ErrorKind::invalid_input, "epsilon must be positive");
}

}  // namespace

double nll(const HazardCurve& hazard, const DiscreteLabel& label, const LossConfig& cfg) {
  check_inputs(hazard, label, cfg);
  const int k = static_cast<int>(hazard.values.size());
  const int e = label.event_interval;
  const auto clamped_log = [&](double x) { return std::log(std::clamp(x, cfg.epsilon, 1.0)); };

  double loglik = 0.0;
  if (label.censored) {
    const int last = std::min(e, k - 1);
    for (int j = 0; j <= last; ++j) loglik += clamped_log(1.0 - hazard.values[j]);
    return -(1.0 - cfg.alpha) * loglik;
  }
  for (int j = 0; j < e; ++j) loglik += clamped_log(1.0 - hazard.values[j]);
  loglik += clamped_log(hazard.values[e]);
  return -cfg.alpha * loglik;
}

std::vector<double> nll_gradient(const HazardCurve& hazard, const DiscreteLabel& label,
                                 const LossConfig& cfg) {
  check_inputs(hazard, label, cfg);
  const int k = static_cast<int>(hazard.values.size());
  const int e = label.event_interval;
  std::vector<double> grad(k, 0.0);
  // d/dh log(clamp(1-h)) = -1/(1-h) while 1-h is inside [eps, 1], else 0
  const auto dlog_one_minus = [&](double h) {
    const double arg = 1.0 - h;
    return (arg >= cfg.epsilon && arg <= 1.0) ? -1.0 / arg : 0.0;
  };

  if (label.censored) {
    const int last = std::min(e, k - 1);
    for (int j = 0; j <= last; ++j)
      grad[j] = -(1.0 - cfg.alpha) * dlog_one_minus(hazard.values[j]);
    return grad;
  }
  for (int j = 0; j < e; ++j) grad[j] = -cfg.alpha * dlog_one_minus(hazard.values[j]);
  const double he = hazard.values[e];
  grad[e] = (he >= cfg.epsilon && he <= 1.0) ? -cfg.alpha / he : 0.0;
  return grad;
}

double batch_nll(const std::vector<HazardCurve>& hazards, const std::vector<DiscreteLabel>& labels,
                 const LossConfig& cfg) {
  if (hazards.size() != labels.size())
    raise(ErrorKind::invalid_input, "batch_nll: list lengths differ");
  double total = 0.0;
  for (std::size_t i = 0; i < hazards.size(); ++i) total += nll(hazards[i], labels[i], cfg);
  return total;
}

}  // namespace hazardlab
