#pragma once

#include <cstdint>

#include "hazardlab/model.hpp"

namespace hazardlab {

struct GradCheckReport {
  double max_rel_err = 0.0;
  int cases = 0;
};

/// Relative error with a 1e-6 floor on the denominator, so coordinates with
/// vanishing gradients compare on an absolute scale.
double gradcheck_rel_err(double analytic, double numeric);

/// Analytic nll_gradient against central finite differences over random
/// (hazard, label) pairs with hazard entries in [0.1, 0.9].
GradCheckReport gradcheck_loss(int n_cases, std::uint64_t seed, double step = 1e-5);

/// Full-model check: every parameter's analytic gradient of nll(forward(...))
/// against central finite differences, over `draws` random parameter draws,
/// bags and labels.
GradCheckReport gradcheck_model(const ModelConfig& cfg, int draws, int bag_size,
                                std::uint64_t seed, double step = 1e-5);

}  // namespace hazardlab
