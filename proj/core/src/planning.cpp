// SPDX-License-Identifier: Apache-2.0

#include "ranopt/planning.hpp"

#include <algorithm>
#include <cmath>

#include "ranopt/error.hpp"

namespace ranopt {

SuppressionModel fit_demand_regressions(std::span<const CellHourlyAggregate> hourly,
                                        const DemandParams& params) {
  SuppressionModel model;
  if (!hourly.empty()) model.cell_id = hourly.front().cell_id;
  if (hourly.empty()) return model;

  std::vector<double> counts;
  counts.reserve(hourly.size());
  for (const auto& h : hourly) counts.push_back(static_cast<double>(h.num_samples));
  model.split_count = *stats::quantile(counts, params.split_quantile);

  std::vector<double> xl, yl, xh, yh;
  for (const auto& h : hourly) {
    const double x = static_cast<double>(h.num_samples);
    if (x <= model.split_count) {
      xl.push_back(x);
      yl.push_back(h.total_bytes);
    } else {
      xh.push_back(x);
      yh.push_back(h.total_bytes);
    }
  }
  model.n_low = xl.size();
  model.n_high = xh.size();
  model.low = stats::ols(xl, yl);
  model.high = stats::ols(xh, yh);
  if (model.low && model.high && model.low->slope != 0.0) {
    model.slope_ratio = model.high->slope / model.low->slope;
    const double se = std::hypot(model.low->slope_std_error, model.high->slope_std_error);
    if (se > 0) model.slope_diff_t = (model.low->slope - model.high->slope) / se;
  }
  if (model.n_low >= params.min_points_per_regime && model.n_high >= params.min_points_per_regime &&
      model.low && model.high) {
    model.suppressed = model.low->slope > 0.0 && model.high->slope < params.bend_ratio * model.low->slope;
  }
  return model;
}

GrowthEstimate estimate_growth(std::span<const double> weekly_counts, std::string cell_id) {
  std::vector<double> w, logc;
  for (std::size_t i = 0; i < weekly_counts.size(); ++i) {
    if (weekly_counts[i] > 0.0) {
      w.push_back(static_cast<double>(i));
      logc.push_back(std::log(weekly_counts[i]));
    }
  }
  if (w.size() < 2) throw Error(ErrorCode::insufficient_data, "growth needs at least two non-zero weeks");
  const auto fit = stats::ols(w, logc);
  if (!fit) throw Error(ErrorCode::insufficient_data, "degenerate weekly series");

  GrowthEstimate g;
  g.cell_id = std::move(cell_id);
  g.weekly_increase = std::expm1(fit->slope);
  g.weeks_observed = w.size();
  g.trusted = w.size() >= 4;
  double ss = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double r = logc[i] - (fit->intercept + fit->slope * w[i]);
    ss += r * r;
  }
  g.residual_rms = std::sqrt(ss / static_cast<double>(w.size()));
  return g;
}

std::vector<double> weekly_sample_counts(std::span<const CellHourlyAggregate> hourly) {
  if (hourly.empty()) return {};
  std::int64_t first = hourly.front().hour_bucket, last = first;
  for (const auto& h : hourly) {
    first = std::min(first, h.hour_bucket);
    last = std::max(last, h.hour_bucket);
  }
  const std::int64_t weeks = (last - first + 1) / 168;
  std::vector<double> totals(static_cast<std::size_t>(weeks), 0.0);
  const std::int64_t start = last + 1 - weeks * 168;
  for (const auto& h : hourly) {
    if (h.hour_bucket < start) continue;
    totals[static_cast<std::size_t>((h.hour_bucket - start) / 168)] += static_cast<double>(h.num_samples);
  }
  return totals;
}

std::vector<HourPoint> current_week(std::span<const CellHourlyAggregate> hourly) {
  if (hourly.empty()) return {};
  std::int64_t first = hourly.front().hour_bucket, last = first;
  for (const auto& h : hourly) {
    first = std::min(first, h.hour_bucket);
    last = std::max(last, h.hour_bucket);
  }
  for (std::int64_t end = last + 1; end - 168 >= first; end -= 168) {
    std::vector<HourPoint> week;
    for (const auto& h : hourly) {
      if (h.hour_bucket >= end - 168 && h.hour_bucket < end) {
        week.push_back({h.hour_bucket, static_cast<double>(h.num_samples), h.total_bytes});
      }
    }
    if (week.size() * 2 >= 168) {
      std::sort(week.begin(), week.end(),
                [](const HourPoint& a, const HourPoint& b) { return a.hour_bucket < b.hour_bucket; });
      return week;
    }
  }
  return {};
}

UpgradeGainPrediction predict_upgrade_gain(const SuppressionModel& model,
                                           std::span<const HourPoint> current_week_hours,
                                           const GrowthEstimate& growth, int horizon_weeks) {
  if (!model.low) throw Error(ErrorCode::invalid_argument, "upgrade gain needs a fitted f1");
  if (horizon_weeks < 0) throw Error(ErrorCode::invalid_argument, "horizon must be non-negative");
  if (current_week_hours.empty()) throw Error(ErrorCode::insufficient_data, "empty current week");

  UpgradeGainPrediction pred;
  pred.cell_id = model.cell_id;
  pred.horizon_weeks = horizon_weeks;
  const double factor = 1.0 + growth.weekly_increase * static_cast<double>(horizon_weeks);
  double predicted = 0.0, current = 0.0;
  for (const auto& h : current_week_hours) {
    UpgradeHourDetail d{h.samples, h.samples * factor, 0.0, h.bytes};
    d.f1_pred = model.f1(d.x_pred);
    predicted += d.f1_pred;
    current += h.bytes;
    pred.hours.push_back(d);
  }
  pred.gain_bytes = predicted - current;
  pred.gain_pct = current > 0.0 ? pred.gain_bytes / current * 100.0 : 0.0;
  return pred;
}

WeeksToExhaustion weeks_to_capacity_exhaustion(const SuppressionModel& model,
                                               std::span<const HourPoint> current_week_hours,
                                               const GrowthEstimate& growth, double threshold_pct,
                                               int n_max) {
  for (int n = 0; n <= n_max; ++n) {
    const double pct = predict_upgrade_gain(model, current_week_hours, growth, n).gain_pct;
    if (pct >= threshold_pct - kExhaustionTolerancePct) return n;
  }
  return BeyondHorizon{};
}

namespace {

double interpolate(const std::vector<LoadCurvePoint>& curve, double load, bool& extrapolated) {
  if (load <= curve.front().load) {
    if (load < curve.front().load) extrapolated = true;
    return curve.front().fitted_kbps;
  }
  if (load >= curve.back().load) {
    if (load > curve.back().load) extrapolated = true;
    return curve.back().fitted_kbps;
  }
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (load <= curve[i].load) {
      const auto& a = curve[i - 1];
      const auto& b = curve[i];
      const double t = (load - a.load) / (b.load - a.load);
      return a.fitted_kbps + t * (b.fitted_kbps - a.fitted_kbps);
    }
  }
  return curve.back().fitted_kbps;
}

}  // namespace

DensificationGainPrediction predict_densification_gain(std::span<const CellHourlyAggregate> hourly,
                                                       const BusyHourLabeling& labeling,
                                                       const DensificationParams& params) {
  std::vector<std::pair<double, double>> points;
  double busy_sum = 0.0;
  std::size_t busy_n = 0;
  for (const auto& h : hourly) {
    if (h.cell_id != labeling.cell_id) continue;
    if (labeling.busy_hours.contains(hour_of_day(h.hour_bucket))) {
      busy_sum += static_cast<double>(h.num_samples);
      ++busy_n;
    }
    if (h.median_kbps) points.emplace_back(static_cast<double>(h.num_samples), *h.median_kbps);
  }
  if (points.size() < params.min_points) {
    throw Error(ErrorCode::insufficient_data, "densification needs more hourly speed points");
  }
  if (busy_n == 0) throw Error(ErrorCode::insufficient_data, "no busy hours labeled");

  auto [min_it, max_it] = std::minmax_element(points.begin(), points.end());
  const double lo = min_it->first, hi = max_it->first;
  const std::size_t nbins = hi > lo ? std::max<std::size_t>(1, params.bins) : 1;
  const double width = hi > lo ? (hi - lo) / static_cast<double>(nbins) : 1.0;
  std::vector<std::vector<std::pair<double, double>>> bins(nbins);
  for (const auto& p : points) {
    auto idx = static_cast<std::size_t>(std::floor((p.first - lo) / width));
    bins[std::min(idx, nbins - 1)].push_back(p);
  }

  DensificationGainPrediction pred;
  pred.cell_id = labeling.cell_id;
  std::vector<double> raw, weights;
  for (const auto& bin : bins) {
    if (bin.size() < params.min_bin_points) continue;
    std::vector<double> loads, speeds;
    for (const auto& [x, y] : bin) {
      loads.push_back(x);
      speeds.push_back(y);
    }
    LoadCurvePoint pt;
    pt.load = *stats::mean(loads);
    pt.raw_kbps = *stats::median(speeds);
    pt.count = bin.size();
    pred.curve.push_back(pt);
    raw.push_back(pt.raw_kbps);
    weights.push_back(static_cast<double>(pt.count));
  }
  if (pred.curve.empty()) throw Error(ErrorCode::insufficient_data, "no populated load bins");
  const auto fitted = stats::pav_non_increasing(raw, weights);
  for (std::size_t i = 0; i < fitted.size(); ++i) pred.curve[i].fitted_kbps = fitted[i];

  pred.busy_load = busy_sum / static_cast<double>(busy_n);
  bool extrapolated = false;
  pred.speed_at_load = interpolate(pred.curve, pred.busy_load, extrapolated);
  pred.speed_at_half_load = interpolate(pred.curve, pred.busy_load / 2.0, extrapolated);
  pred.extrapolated = extrapolated;
  pred.gain_kbps = pred.speed_at_half_load - pred.speed_at_load;
  return pred;
}

std::vector<PlanningCandidate> rank_planning_candidates(std::vector<PlanningCandidate> cells,
                                                        std::optional<std::size_t> budget_limit) {
  // Returns <0 when a ranks ahead of b, >0 when behind, 0 when tied.
  auto cmp_desc = [](const std::optional<double>& a, const std::optional<double>& b) {
    if (a.has_value() != b.has_value()) return a.has_value() ? -1 : 1;
    if (!a || *a == *b) return 0;
    return *a > *b ? -1 : 1;
  };
  std::sort(cells.begin(), cells.end(), [&](const PlanningCandidate& a, const PlanningCandidate& b) {
    if (int c = cmp_desc(a.gain_bytes, b.gain_bytes)) return c < 0;
    if (int c = cmp_desc(a.densification_gain_kbps, b.densification_gain_kbps)) return c < 0;
    if (int c = cmp_desc(a.congestion_pct, b.congestion_pct)) return c < 0;
    return a.cell_id < b.cell_id;
  });
  if (budget_limit && cells.size() > *budget_limit) cells.resize(*budget_limit);
  return cells;
}

}  // namespace ranopt
