#include "hazardlab/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "hazardlab/errors.hpp"
#include "hazardlab/loss.hpp"
#include "hazardlab/numeric.hpp"

namespace hazardlab {

double gradcheck_rel_err(double analytic, double numeric) {
  const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-6});
  return std::fabs(analytic - numeric) / denom;
}

GradCheckReport gradcheck_loss(int n_cases, std::uint64_t seed, double step) {
  GradCheckReport report;
  report.cases = n_cases;
  num::Rng rng(seed);
  for (int c = 0; c < n_cases; ++c) {
    const int k = 3 + static_cast<int>(rng.integer(28));
    HazardCurve h;
    h.values.resize(k);
    for (double& v : h.values) v = rng.uniform(0.1, 0.9);

    DiscreteLabel label;
    label.censored = rng.uniform() < 0.5;
    label.event_interval =
        static_cast<int>(rng.integer(label.censored ? k + 1 : k));
    label.survival_indicator.assign(k, 0);
    for (int j = 0; j < std::min(label.event_interval, k); ++j) label.survival_indicator[j] = 1;

    LossConfig cfg;
    cfg.alpha = rng.uniform(0.1, 0.9);

    const std::vector<double> analytic = nll_gradient(h, label, cfg);
    for (int j = 0; j < k; ++j) {
      HazardCurve hp = h, hm = h;
      hp.values[j] += step;
      hm.values[j] -= step;
      const double fd = (nll(hp, label, cfg) - nll(hm, label, cfg)) / (2.0 * step);
      report.max_rel_err = std::max(report.max_rel_err, gradcheck_rel_err(analytic[j], fd));
    }
  }
  return report;
}

GradCheckReport gradcheck_model(const ModelConfig& cfg, int draws, int bag_size,
                                std::uint64_t seed, double step) {
  cfg.validate();
  if (bag_size < 1) raise(ErrorKind::invalid_input, "bag_size must be >= 1");
  const TimeGrid grid = TimeGrid::uniform(cfg.interval_count, 3.0);
  const LossConfig loss_cfg;

  GradCheckReport report;
  report.cases = draws;
  num::Rng rng(seed);
  for (int draw = 0; draw < draws; ++draw) {
    ModelConfig draw_cfg = cfg;
    draw_cfg.seed = num::mix_seed(seed, static_cast<std::uint64_t>(draw));
    ModelParams params = init_params(draw_cfg);

    Eigen::MatrixXd bag(bag_size, cfg.feature_dim);
    for (Eigen::Index r = 0; r < bag.rows(); ++r)
      for (Eigen::Index c = 0; c < bag.cols(); ++c) bag(r, c) = rng.gaussian();
    const double bin = rng.uniform();

    DiscreteLabel label;
    label.censored = rng.uniform() < 0.5;
    label.event_interval = static_cast<int>(
        rng.integer(label.censored ? cfg.interval_count + 1 : cfg.interval_count));
    label.survival_indicator.assign(cfg.interval_count, 0);
    for (int j = 0; j < std::min(label.event_interval, cfg.interval_count); ++j)
      label.survival_indicator[j] = 1;

    const ForwardResult fwd = forward(bag, bin, grid, params, draw_cfg);
    const std::vector<double> upstream = nll_gradient(fwd.hazard, label, loss_cfg);
    const ModelParams analytic = backward(fwd.cache, upstream, params, draw_cfg);

    const auto loss_at = [&](const ModelParams& p) {
      return nll(forward(bag, bin, grid, p, draw_cfg).hazard, label, loss_cfg);
    };

    const auto p_list = params.tensors();
    const auto a_list = analytic.tensors();
    for (int t = 0; t < ModelParams::kTensorCount; ++t) {
      Eigen::MatrixXd& tensor = *p_list[t];
      for (Eigen::Index idx = 0; idx < tensor.size(); ++idx) {
        const double saved = tensor(idx);
        tensor(idx) = saved + step;
        const double up = loss_at(params);
        tensor(idx) = saved - step;
        const double down = loss_at(params);
        tensor(idx) = saved;
        const double fd = (up - down) / (2.0 * step);
        report.max_rel_err =
            std::max(report.max_rel_err, gradcheck_rel_err((*a_list[t])(idx), fd));
      }
    }
  }
  return report;
}

}  // namespace hazardlab
