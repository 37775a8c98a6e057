// SPDX-License-Identifier: Apache-2.0

#include "ranopt/sensitivity.hpp"

#include <algorithm>
#include <cmath>

#include "ranopt/detection.hpp"
#include "ranopt/error.hpp"
#include "ranopt/stats.hpp"

namespace ranopt {

std::vector<XYPoint> points_from_samples(std::span<const MeasurementSample> samples, Metric x_metric,
                                         Metric y_metric, std::string_view cell_id) {
  std::vector<XYPoint> points;
  for (const auto& s : samples) {
    if (!cell_id.empty() && s.cell_id != cell_id) continue;
    auto x = sample_metric(s, x_metric);
    auto y = sample_metric(s, y_metric);
    if (x && y) points.push_back({*x, *y});
  }
  return points;
}

SensitivityParams default_sensitivity_params(Metric x_metric) {
  SensitivityParams p;
  p.bin_width = x_metric == Metric::rsrq_db ? 1.0 : 2.0;
  return p;
}

const SensitivityBin* SensitivityModel::bin_at(double x) const {
  const auto idx = static_cast<std::int64_t>(std::floor(x / bin_width));
  auto it = std::lower_bound(bins.begin(), bins.end(), idx,
                             [](const SensitivityBin& b, std::int64_t i) { return b.index < i; });
  if (it == bins.end() || it->index != idx) return nullptr;
  return &*it;
}

double SensitivityModel::support_low() const {
  return bins.empty() ? 0.0 : static_cast<double>(bins.front().index) * bin_width;
}

double SensitivityModel::support_high() const {
  return bins.empty() ? 0.0 : static_cast<double>(bins.back().index + 1) * bin_width;
}

SensitivityModel fit_sensitivity(std::span<const XYPoint> points, std::string cell_id, Metric x_metric,
                                 Metric y_metric, const SensitivityParams& params) {
  if (points.size() < params.min_total) {
    throw Error(ErrorCode::insufficient_data, "sensitivity fit for " + cell_id + " has " +
                                                  std::to_string(points.size()) + " points");
  }
  if (!(params.bin_width > 0)) throw Error(ErrorCode::invalid_argument, "bin_width must be positive");

  std::map<std::int64_t, std::pair<std::vector<double>, std::vector<double>>> raw;
  for (const auto& p : points) {
    auto& [xs, ys] = raw[static_cast<std::int64_t>(std::floor(p.x / params.bin_width))];
    xs.push_back(p.x);
    ys.push_back(p.y);
  }

  SensitivityModel model;
  model.cell_id = std::move(cell_id);
  model.x_metric = x_metric;
  model.y_metric = y_metric;
  model.bin_width = params.bin_width;
  for (const auto& [idx, xy] : raw) {
    if (xy.first.size() < params.min_bin_samples) continue;
    SensitivityBin bin;
    bin.index = idx;
    bin.x_center = (static_cast<double>(idx) + 0.5) * params.bin_width;
    bin.x_median = *stats::median(xy.first);
    bin.median_y = *stats::median(xy.second);
    bin.count = xy.first.size();
    model.bins.push_back(bin);
  }
  if (model.bins.empty()) {
    throw Error(ErrorCode::insufficient_data, "no populated sensitivity bin for " + model.cell_id);
  }

  for (auto& bin : model.bins) {
    std::vector<double> x, y, w;
    std::size_t window_points = 0;
    for (const auto& other : model.bins) {
      if (std::abs(other.index - bin.index) > params.window_half_bins) continue;
      x.push_back(other.x_median);
      y.push_back(other.median_y);
      w.push_back(static_cast<double>(other.count));
      window_points += other.count;
    }
    if (x.size() < params.min_window_bins || window_points < params.min_window_points) continue;
    if (auto fit = stats::weighted_least_squares(x, y, w)) {
      bin.slope = fit->slope;
      bin.window_r2 = fit->r_squared;
    }
  }
  return model;
}

std::optional<double> local_slope(const SensitivityModel& model, double x) {
  const SensitivityBin* bin = model.bin_at(x);
  if (!bin) return std::nullopt;
  return bin->slope;
}

UpliftPrediction predict_uplift(const SensitivityModel& model, double x_from, double delta_x) {
  UpliftPrediction pred;
  pred.cell_id = model.cell_id;
  pred.x_from = x_from;
  pred.x_to = x_from + delta_x;
  const double lo = std::min(pred.x_from, pred.x_to);
  const double hi = std::max(pred.x_from, pred.x_to);
  if (model.bins.empty() || hi < model.support_low() || lo > model.support_high()) {
    throw Error(ErrorCode::out_of_support, "uplift interval outside the populated range of " + model.cell_id);
  }
  if (lo == hi) return pred;

  const double w = model.bin_width;
  const auto first = static_cast<std::int64_t>(std::floor(lo / w));
  const auto last = static_cast<std::int64_t>(std::floor(hi / w));
  double total = 0.0;
  for (std::int64_t k = first; k <= last; ++k) {
    const double from = std::max(lo, static_cast<double>(k) * w);
    const double to = std::min(hi, static_cast<double>(k + 1) * w);
    if (!(to > from)) continue;
    UpliftSegment seg{k, from, to, std::nullopt, 0.0};
    const SensitivityBin* bin = model.bin_at((static_cast<double>(k) + 0.5) * w);
    if (bin && bin->slope) {
      seg.slope = bin->slope;
      seg.contribution = *bin->slope * (to - from);
    } else {
      pred.crosses_undefined = true;
    }
    total += seg.contribution;
    pred.path.push_back(seg);
  }
  if (delta_x < 0) {
    total = -total;
    for (auto& seg : pred.path) seg.contribution = -seg.contribution;
  }
  pred.predicted_delta_y = total;
  return pred;
}

std::vector<CellPriority> prioritize_cells(std::span<const CellProfile> profiles,
                                           const std::map<std::string, SensitivityModel>& models,
                                           const PriorityWeights& weights) {
  const Direction dir = bad_direction(weights.y_metric);
  std::vector<CellPriority> out;
  std::vector<std::optional<double>> ys;
  for (const auto& p : profiles) {
    CellPriority c;
    c.cell_id = p.cell_id;
    if (auto it = models.find(p.cell_id); it != models.end()) {
      if (auto x = p.metric(weights.x_metric)) c.slope = local_slope(it->second, *x);
    }
    out.push_back(c);
    ys.push_back(p.metric(weights.y_metric));
  }

  std::size_t n_y = 0, n_s = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (ys[i]) ++n_y;
    if (out[i].slope) ++n_s;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (ys[i]) {
      std::size_t better = 0;
      for (std::size_t j = 0; j < out.size(); ++j) {
        if (!ys[j]) continue;
        if (dir == Direction::low_is_bad ? *ys[j] > *ys[i] : *ys[j] < *ys[i]) ++better;
      }
      out[i].badness_rank = n_y > 1 ? static_cast<double>(better) / static_cast<double>(n_y - 1) : 1.0;
    }
    if (out[i].slope) {
      std::size_t flatter = 0;
      for (std::size_t j = 0; j < out.size(); ++j) {
        if (out[j].slope && std::abs(*out[j].slope) < std::abs(*out[i].slope)) ++flatter;
      }
      out[i].sensitivity_rank =
          n_s > 1 ? static_cast<double>(flatter) / static_cast<double>(n_s - 1) : 1.0;
    }
    out[i].score = weights.badness * out[i].badness_rank + weights.sensitivity * out[i].sensitivity_rank;
  }
  std::sort(out.begin(), out.end(), [](const CellPriority& a, const CellPriority& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.cell_id < b.cell_id;
  });
  return out;
}

}  // namespace ranopt
