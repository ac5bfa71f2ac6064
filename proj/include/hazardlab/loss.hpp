#pragma once

#include <vector>

#include "hazardlab/survival.hpp"

namespace hazardlab {

struct LossConfig {
  double alpha = 0.5;     // uncensored-term weight; censored gets (1 - alpha)
  double epsilon = 1e-7;  // clamp for log arguments (sigmoid outputs can saturate)
};

/// Negated per-subject log-likelihood of the discrete hazard model, so that
/// minimization maximizes likelihood.
/// Uncensored (event in interval e): -alpha * [log h[e] + sum_{j<e} log(1-h[j])].
/// Censored at interval e: -(1-alpha) * sum_{j<=e} log(1-h[j]).
/// Log arguments are clamped to [epsilon, 1].
double nll(const HazardCurve& hazard, const DiscreteLabel& label, const LossConfig& cfg);

/// d(nll)/dh[j]; zero wherever the corresponding clamp is active.
std::vector<double> nll_gradient(const HazardCurve& hazard, const DiscreteLabel& label,
                                 const LossConfig& cfg);

/// Sum of per-subject nll values (callers normalize if they want a mean).
double batch_nll(const std::vector<HazardCurve>& hazards, const std::vector<DiscreteLabel>& labels,
                 const LossConfig& cfg);

}  // namespace hazardlab
