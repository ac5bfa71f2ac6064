#include "hazardlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hazardlab/errors.hpp"
#include "hazardlab/numeric.hpp"

namespace hazardlab {

namespace {

void check_outcomes(const std::vector<double>& times, const std::vector<std::uint8_t>& censored) {
  if (times.empty()) raise(ErrorKind::insufficient_data, "empty outcome list");
  if (times.size() != censored.size())
    raise(ErrorKind::invalid_input, "times and censor flags differ in length");
  for (double t : times)
    if (!std::isfinite(t) || t < 0.0)
      raise(ErrorKind::invalid_input, "times must be finite and >= 0");
}

void check_curves(const std::vector<SurvivalCurve>& curves,
                  const std::vector<DiscreteLabel>& labels, const TimeGrid& grid) {
  if (curves.size() != labels.size())
    raise(ErrorKind::invalid_input, "curves and labels differ in length");
  if (curves.empty()) raise(ErrorKind::insufficient_data, "empty cohort");
  const int k = grid.interval_count();
  for (const auto& c : curves) {
    validate_survival(c);
    if (static_cast<int>(c.values.size()) != k)
      raise(ErrorKind::invalid_input, "curve length does not match grid");
  }
  for (const auto& l : labels) {
    if (static_cast<int>(l.survival_indicator.size()) != k)
      raise(ErrorKind::invalid_input, "label length does not match grid");
    if (l.event_interval < 0 || l.event_interval > k)
      raise(ErrorKind::invalid_input, "event_interval outside [0, k]");
  }
}

// Observed time at grid resolution; labels beyond the grid map past t_k.
double discrete_time(const DiscreteLabel& label, const TimeGrid& grid) {
  const int k = grid.interval_count();
  return label.event_interval < k ? grid.boundaries[label.event_interval] : grid.horizon() + 1.0;
}

std::vector<std::uint8_t> flipped(const std::vector<std::uint8_t>& flags) {
  std::vector<std::uint8_t> out(flags.size());
  for (std::size_t i = 0; i < flags.size(); ++i) out[i] = flags[i] ? 0 : 1;
  return out;
}

double fh_weight(double s_left, const LogRankConfig& cfg) {
  double w = 1.0;
  if (cfg.fh_p > 0.0) w *= std::pow(s_left, cfg.fh_p);
  if (cfg.fh_q > 0.0) w *= std::pow(1.0 - s_left, cfg.fh_q);
  return w;
}

}  // namespace

double KMCurve::survival_at(double t) const {
  // product over event times <= t
  const auto it = std::upper_bound(event_times.begin(), event_times.end(), t);
  if (it == event_times.begin()) return 1.0;
  return survival[static_cast<std::size_t>(it - event_times.begin()) - 1];
}

double KMCurve::survival_before(double t) const {
  const auto it = std::lower_bound(event_times.begin(), event_times.end(), t);
  if (it == event_times.begin()) return 1.0;
  return survival[static_cast<std::size_t>(it - event_times.begin()) - 1];
}

KMCurve kaplan_meier(const std::vector<double>& times, const std::vector<std::uint8_t>& censored) {
  check_outcomes(times, censored);
  const std::size_t n = times.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  KMCurve out;
  double s = 1.0;
  std::size_t i = 0;
  std::size_t at_risk = n;
  while (i < n) {
    const double tau = times[order[i]];
    std::size_t j = i;
    int events = 0;
    while (j < n && times[order[j]] == tau) {
      if (!censored[order[j]]) ++events;
      ++j;
    }
    if (events > 0) {
      s *= 1.0 - static_cast<double>(events) / static_cast<double>(at_risk);
      out.event_times.push_back(tau);
      out.survival.push_back(s);
      out.at_risk.push_back(static_cast<int>(at_risk));
    }
    at_risk -= j - i;  // everyone with this time leaves the risk set afterwards
    i = j;
  }
  return out;
}

CdAucResult cd_auc(const std::vector<SurvivalCurve>& curves,
                   const std::vector<DiscreteLabel>& labels, const TimeGrid& grid) {
  check_curves(curves, labels, grid);
  const std::size_t n = curves.size();
  const int k = grid.interval_count();

  std::vector<double> obs(n);
  std::vector<std::uint8_t> cens(n);
  for (std::size_t i = 0; i < n; ++i) {
    obs[i] = discrete_time(labels[i], grid);
    cens[i] = labels[i].censored ? 1 : 0;
  }
  const KMCurve censor_km = kaplan_meier(obs, flipped(cens));
  const KMCurve event_km = kaplan_meier(obs, cens);

  CdAucResult result;
  double weight_sum = 0.0;
  double weighted_auc = 0.0;
  double prev_t = 0.0;
  for (int j = 0; j < k; ++j) {
    const double t = grid.boundaries[j];
    const double interval_mass = event_km.survival_at(prev_t) - event_km.survival_at(t);
    prev_t = t;

    std::vector<std::size_t> cases, controls;
    for (std::size_t i = 0; i < n; ++i) {
      if (!labels[i].censored && labels[i].event_interval <= j)
        cases.push_back(i);
      else if (labels[i].event_interval > j)
        controls.push_back(i);
    }
    if (cases.empty() || controls.empty()) continue;

    const double control_weight = 1.0 / censor_km.survival_at(t);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i : cases) {
      const double wi = 1.0 / censor_km.survival_before(obs[i]);
      const double si = curves[i].values[j];
      double row = 0.0;
      for (std::size_t c : controls) {
        const double sc = curves[c].values[j];
        if (si < sc)
          row += 1.0;
        else if (si == sc)
          row += 0.5;
      }
      num += wi * control_weight * row;
      den += wi * control_weight * static_cast<double>(controls.size());
    }
    const double auc_t = num / den;
    result.over_time.emplace_back(t, auc_t);
    weight_sum += interval_mass;
    weighted_auc += interval_mass * auc_t;
  }

  if (result.over_time.empty())
    raise(ErrorKind::undefined_metric, "cd_auc: no comparable pairs at any grid time");
  if (weight_sum > 0.0) {
    result.integrated = weighted_auc / weight_sum;
  } else {  // no event mass on the evaluable times; fall back to a plain mean
    double s = 0.0;
    for (const auto& [t, a] : result.over_time) s += a;
    result.integrated = s / static_cast<double>(result.over_time.size());
  }
  return result;
}

double harrell_cindex(const std::vector<RiskScore>& risks, const std::vector<double>& times,
                      const std::vector<std::uint8_t>& censored) {
  check_outcomes(times, censored);
  if (risks.size() != times.size())
    raise(ErrorKind::invalid_input, "risks and times differ in length");
  const std::size_t n = times.size();
  double concordant = 0.0;
  std::size_t admissible = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (censored[i]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !(times[i] < times[j])) continue;
      ++admissible;
      if (risks[i].value > risks[j].value)
        concordant += 1.0;
      else if (risks[i].value == risks[j].value)
        concordant += 0.5;
    }
  }
  if (admissible == 0) raise(ErrorKind::undefined_metric, "c-index: no admissible pairs");
  return concordant / static_cast<double>(admissible);
}

double brier(const std::vector<SurvivalCurve>& curves, const std::vector<DiscreteLabel>& labels,
             const TimeGrid& grid) {
  check_curves(curves, labels, grid);
  const std::size_t n = curves.size();
  const int k = grid.interval_count();

  std::vector<double> obs(n);
  std::vector<std::uint8_t> cens(n);
  for (std::size_t i = 0; i < n; ++i) {
    obs[i] = discrete_time(labels[i], grid);
    cens[i] = labels[i].censored ? 1 : 0;
  }
  const KMCurve censor_km = kaplan_meier(obs, flipped(cens));

  std::vector<double> bs(k, 0.0);
  for (int j = 0; j < k; ++j) {
    const double t = grid.boundaries[j];
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = curves[i].values[j];
      if (labels[i].event_interval > j) {  // still at risk at t
        const double g = censor_km.survival_at(t);
        if (g <= 0.0)
          raise(ErrorKind::undefined_weight,
                "brier: censoring weight vanishes at t=" + std::to_string(t));
        acc += (1.0 - s) * (1.0 - s) / g;
      } else if (!labels[i].censored) {  // event on or before t
        const double g = censor_km.survival_before(obs[i]);
        if (g <= 0.0)
          raise(ErrorKind::undefined_weight,
                "brier: censoring weight vanishes at t=" + std::to_string(obs[i]));
        acc += s * s / g;
      }
      // censored before t contributes nothing
    }
    bs[j] = acc / static_cast<double>(n);
  }

  // trapezoid over [0, t_k], the curve anchored at t=0 with its first value
  double integral = bs[0] * grid.boundaries[0];
  for (int j = 1; j < k; ++j)
    integral += 0.5 * (bs[j - 1] + bs[j]) * (grid.boundaries[j] - grid.boundaries[j - 1]);
  return integral / grid.horizon();
}

DCalibrationResult d_calibration(const std::vector<SurvivalCurve>& curves,
                                 const std::vector<DiscreteLabel>& labels, const TimeGrid& grid,
                                 int bins) {
  check_curves(curves, labels, grid);
  if (bins < 2) raise(ErrorKind::invalid_input, "d_calibration needs >= 2 bins");
  const std::size_t n = curves.size();
  const int k = grid.interval_count();

  DCalibrationResult out;
  out.histogram.assign(bins, 0.0);
  const double width = 1.0 / bins;
  for (std::size_t i = 0; i < n; ++i) {
    const int idx = std::min(labels[i].event_interval, k - 1);
    const double s = curves[i].values[idx];
    if (!labels[i].censored || s <= 0.0) {
      const int b = std::min(static_cast<int>(s * bins), bins - 1);
      out.histogram[b] += 1.0;
    } else {
      // spread the censored subject's mass uniformly over [0, s]
      for (int b = 0; b < bins; ++b) {
        const double lo = b * width;
        const double hi = lo + width;
        out.histogram[b] += std::max(0.0, std::min(hi, s) - lo) / s;
      }
    }
  }

  const double expected = static_cast<double>(n) / bins;
  for (double observed : out.histogram) {
    const double diff = observed - expected;
    out.statistic += diff * diff / expected;
  }
  out.pvalue = num::chi2_sf(out.statistic, bins - 1);
  return out;
}

LogRankResult logrank_fh(const std::vector<double>& times_a,
                         const std::vector<std::uint8_t>& censored_a,
                         const std::vector<double>& times_b,
                         const std::vector<std::uint8_t>& censored_b, const LogRankConfig& cfg) {
  check_outcomes(times_a, censored_a);
  check_outcomes(times_b, censored_b);
  if (cfg.fh_p < 0.0 || cfg.fh_q < 0.0)
    raise(ErrorKind::invalid_input, "Fleming-Harrington exponents must be >= 0");

  std::vector<double> pooled_t(times_a);
  pooled_t.insert(pooled_t.end(), times_b.begin(), times_b.end());
  std::vector<std::uint8_t> pooled_c(censored_a);
  pooled_c.insert(pooled_c.end(), censored_b.begin(), censored_b.end());
  const KMCurve pooled_km = kaplan_meier(pooled_t, pooled_c);
  if (pooled_km.event_times.empty())
    raise(ErrorKind::insufficient_data, "logrank: no events in the pooled sample");

  double num = 0.0;
  double var = 0.0;
  for (double tau : pooled_km.event_times) {
    std::size_t n_a = 0, n_pool = 0;
    int d_a = 0, d_pool = 0;
    for (std::size_t i = 0; i < times_a.size(); ++i) {
      if (times_a[i] >= tau) ++n_a;
      if (times_a[i] == tau && !censored_a[i]) ++d_a;
    }
    for (std::size_t i = 0; i < times_b.size(); ++i)
      if (times_b[i] >= tau) ++n_pool;
    n_pool += n_a;
    for (std::size_t i = 0; i < pooled_t.size(); ++i)
      if (pooled_t[i] == tau && !pooled_c[i]) ++d_pool;

    const double w = fh_weight(pooled_km.survival_before(tau), cfg);
    const double frac_a = static_cast<double>(n_a) / static_cast<double>(n_pool);
    num += w * (d_a - d_pool * frac_a);
    if (n_pool > 1) {
      var += w * w * d_pool * frac_a * (1.0 - frac_a) *
             (static_cast<double>(n_pool - d_pool) / static_cast<double>(n_pool - 1));
    }
  }

  LogRankResult out;
  if (var <= 0.0) {  // degenerate risk sets; no evidence either way
    out.statistic = 0.0;
    out.pvalue = 1.0;
    return out;
  }
  out.statistic = num * num / var;
  out.pvalue = num::chi2_sf(out.statistic, 1.0);
  return out;
}

MetricsReport evaluate_predictions(const std::vector<SurvivalCurve>& curves,
                                   const std::vector<RiskScore>& risks,
                                   const std::vector<DiscreteLabel>& labels, const TimeGrid& grid,
                                   int dcal_bins, double significance) {
  MetricsReport report;
  const CdAucResult auc = cd_auc(curves, labels, grid);
  report.integrated_cd_auc = auc.integrated;
  report.auc_over_time = auc.over_time;
  report.brier = brier(curves, labels, grid);

  std::vector<double> times(labels.size());
  std::vector<std::uint8_t> cens(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    times[i] = discrete_time(labels[i], grid);
    cens[i] = labels[i].censored ? 1 : 0;
  }
  report.c_index = harrell_cindex(risks, times, cens);

  const DCalibrationResult dcal = d_calibration(curves, labels, grid, dcal_bins);
  report.dcal_statistic = dcal.statistic;
  report.dcal_pvalue = dcal.pvalue;
  report.dcal_pass = dcal.pvalue > significance;
  return report;
}

}  // namespace hazardlab
