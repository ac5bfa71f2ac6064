#include "hazardlab/synthcohort.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hazardlab/errors.hpp"
#include "hazardlab/numeric.hpp"

namespace hazardlab {

namespace {

constexpr double kHazardCap = 0.99;

struct RawSubject {
  double fraction = 0.0;
  double event_time = std::numeric_limits<double>::infinity();  // inf = beyond grid
  double censor_uniform = 0.0;  // fixed draw; censor time scales with the rate
};

double clamped_hazard(double base, double beta, double fraction) {
  return std::clamp(base * std::exp(beta * fraction), 0.0, kHazardCap);
}

// censored fraction realized at exponential censoring rate `rate`
double realized_censored_fraction(const std::vector<RawSubject>& raw, double rate,
                                  double admin_time) {
  int censored = 0;
  for (const auto& s : raw) {
    const double censor_time = std::min(-std::log1p(-s.censor_uniform) / rate, admin_time);
    if (s.event_time > censor_time) ++censored;
  }
  return static_cast<double>(censored) / static_cast<double>(raw.size());
}

}  // namespace

void CohortConfig::validate() const {
  if (subject_count < 1 || bag_size < 1 || feature_dim < 1)
    raise(ErrorKind::config, "cohort counts must be positive");
  if (!(malignant_fraction_lo >= 0.0 && malignant_fraction_hi <= 1.0 &&
        malignant_fraction_lo <= malignant_fraction_hi))
    raise(ErrorKind::config, "malignant fraction range must lie within [0, 1]");
  if (!(base_hazard > 0.0 && base_hazard < 1.0))
    raise(ErrorKind::config, "base_hazard must lie in (0, 1)");
  if (!(censor_fraction_target >= 0.0 && censor_fraction_target <= 1.0))
    raise(ErrorKind::config, "censor_fraction_target must lie in [0, 1]");
  if (!(admin_censor_time > 0.0)) raise(ErrorKind::config, "admin_censor_time must be positive");
  if (!(signal_magnitude >= 0.0)) raise(ErrorKind::config, "signal_magnitude must be >= 0");
}

std::vector<double> malignant_signal_direction(int feature_dim) {
  // fixed direction: all-ones, unit norm
  const double v = 1.0 / std::sqrt(static_cast<double>(feature_dim));
  return std::vector<double>(feature_dim, v);
}

HazardCurve OracleModel::hazard_for(double fraction, const TimeGrid& grid) const {
  HazardCurve h;
  h.values.assign(grid.interval_count(), clamped_hazard(base_hazard, risk_effect, fraction));
  return h;
}

std::pair<std::vector<SubjectRecord>, OracleModel> generate_cohort(const CohortConfig& cfg,
                                                                   const TimeGrid& grid) {
  cfg.validate();
  const int n = cfg.subject_count;
  const int k = grid.interval_count();
  const std::vector<double> signal = malignant_signal_direction(cfg.feature_dim);

  std::vector<RawSubject> raw(n);
  std::vector<SubjectRecord> cohort(n);

  // per-subject derived streams keep parallel and serial generation identical
  num::parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      num::Rng rng(num::mix_seed(cfg.seed, i));
      RawSubject& r = raw[i];
      r.fraction = rng.uniform(cfg.malignant_fraction_lo, cfg.malignant_fraction_hi);
      const double hazard = clamped_hazard(cfg.base_hazard, cfg.risk_effect, r.fraction);

      // discrete event interval, continuous time uniform within the interval
      for (int j = 0; j < k; ++j) {
        if (rng.uniform() < hazard) {
          const double lo = (j == 0) ? 0.0 : grid.boundaries[j - 1];
          const double hi = grid.boundaries[j];
          r.event_time = hi - rng.uniform() * (hi - lo);  // in (lo, hi]
          break;
        }
      }
      r.censor_uniform = rng.uniform();

      SubjectRecord& s = cohort[i];
      s.id = "subject-" + std::to_string(i);
      s.true_risk = r.fraction;
      s.bag.resize(cfg.bag_size);
      s.instance_labels.emplace(cfg.bag_size, 0);
      for (int p = 0; p < cfg.bag_size; ++p) {
        const bool malignant = rng.uniform() < r.fraction;
        (*s.instance_labels)[p] = malignant ? 1 : 0;
        auto& inst = s.bag[p];
        inst.resize(cfg.feature_dim);
        for (int c = 0; c < cfg.feature_dim; ++c) {
          double value = rng.gaussian();
          if (malignant) value += cfg.signal_magnitude * signal[c];
          inst[c] = static_cast<double>(static_cast<float>(value));  // match the f32 file format
        }
      }
    }
  });

  // tune the exponential censoring rate against the realized censored fraction
  double rate_lo = 1e-8, rate_hi = 16.0;
  const double floor_frac = realized_censored_fraction(raw, rate_lo, cfg.admin_censor_time);
  const double ceil_frac = realized_censored_fraction(raw, rate_hi, cfg.admin_censor_time);
  if (cfg.censor_fraction_target < floor_frac - 0.04 ||
      cfg.censor_fraction_target > ceil_frac + 0.04)
    raise(ErrorKind::config,
          "censoring target " + std::to_string(cfg.censor_fraction_target) +
              " infeasible (attainable range ~[" + std::to_string(floor_frac) + ", " +
              std::to_string(ceil_frac) + "])");
  for (int iter = 0; iter < 100; ++iter) {
    const double mid = std::sqrt(rate_lo * rate_hi);  // bisect in log space
    if (realized_censored_fraction(raw, mid, cfg.admin_censor_time) >
        cfg.censor_fraction_target)
      rate_hi = mid;
    else
      rate_lo = mid;
  }
  const double rate = std::sqrt(rate_lo * rate_hi);
  const double realized = realized_censored_fraction(raw, rate, cfg.admin_censor_time);
  if (std::fabs(realized - cfg.censor_fraction_target) > 0.04)
    raise(ErrorKind::config, "censoring tuning did not reach the target fraction (realized " +
                                 std::to_string(realized) + ")");

  OracleModel oracle;
  oracle.base_hazard = cfg.base_hazard;
  oracle.risk_effect = cfg.risk_effect;
  oracle.true_risk.resize(n);
  for (int i = 0; i < n; ++i) {
    const RawSubject& r = raw[i];
    const double censor_time =
        std::min(-std::log1p(-r.censor_uniform) / rate, cfg.admin_censor_time);
    cohort[i].censored = r.event_time > censor_time;
    cohort[i].observed_time = std::min(r.event_time, censor_time);
    oracle.true_risk[i] = r.fraction;
  }
  return {std::move(cohort), std::move(oracle)};
}

std::vector<SurvivalCurve> oracle_predictions(const std::vector<SubjectRecord>& cohort,
                                              const OracleModel& oracle, const TimeGrid& grid) {
  if (!oracle.true_risk.empty() && oracle.true_risk.size() != cohort.size())
    raise(ErrorKind::invalid_input, "oracle does not match the cohort size");
  std::vector<SurvivalCurve> out;
  out.reserve(cohort.size());
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    if (!cohort[i].true_risk)
      raise(ErrorKind::invalid_input,
            "subject " + cohort[i].id + " carries no true_risk; oracle predictions undefined");
    if (!oracle.true_risk.empty() &&
        *cohort[i].true_risk != oracle.true_risk[i])
      raise(ErrorKind::invalid_input, "oracle true_risk mismatch at subject " + cohort[i].id);
    out.push_back(survival_from_hazard(oracle.hazard_for(*cohort[i].true_risk, grid)));
  }
  return out;
}

std::vector<SubjectRecord> generate_stitched_bags(const CohortConfig& cfg, int count) {
  cfg.validate();
  if (count < 1) raise(ErrorKind::config, "stitched bag count must be positive");
  if (cfg.bag_size % 2 != 0)
    raise(ErrorKind::config, "stitched bags need an even bag_size");
  const std::vector<double> signal = malignant_signal_direction(cfg.feature_dim);

  std::vector<SubjectRecord> bags(count);
  for (int i = 0; i < count; ++i) {
    num::Rng rng(num::mix_seed(cfg.seed, 0x57137ULL + i));
    SubjectRecord& s = bags[i];
    s.id = "stitch-" + std::to_string(i);
    s.observed_time = 0.0;
    s.censored = true;
    s.bag.resize(cfg.bag_size);
    s.instance_labels.emplace(cfg.bag_size, 0);
    for (int p = 0; p < cfg.bag_size; ++p) {
      const bool malignant = p >= cfg.bag_size / 2;
      (*s.instance_labels)[p] = malignant ? 1 : 0;
      auto& inst = s.bag[p];
      inst.resize(cfg.feature_dim);
      for (int c = 0; c < cfg.feature_dim; ++c) {
        double value = rng.gaussian();
        if (malignant) value += cfg.signal_magnitude * signal[c];
        inst[c] = static_cast<double>(static_cast<float>(value));
      }
    }
  }
  return bags;
}

}  // namespace hazardlab
