// SPDX-License-Identifier: Apache-2.0
//
// Binned local-slope sensitivity of an experience metric (y) against a radio
// metric (x), and uplift prediction by piecewise integration of the slopes.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ranopt/aggregation.hpp"

namespace ranopt {

struct XYPoint {
  double x = 0.0;
  double y = 0.0;
};

/// (x, y) pairs from samples carrying both metrics, in input order.
std::vector<XYPoint> points_from_samples(std::span<const MeasurementSample> samples, Metric x_metric,
                                         Metric y_metric, std::string_view cell_id = {});

struct SensitivityParams {
  double bin_width = 2.0;
  std::size_t min_total = 200;
  std::size_t min_bin_samples = 80;   // a bin below this count is unpopulated
  int window_half_bins = 2;           // slope window k-2..k+2
  std::size_t min_window_bins = 3;
  std::size_t min_window_points = 300;
};

/// Defaults per x metric: 2 dB bins for rsrp, 1 dB for rsrq.
SensitivityParams default_sensitivity_params(Metric x_metric);

struct SensitivityBin {
  std::int64_t index = 0;  // bin covers [index * width, (index + 1) * width)
  double x_center = 0.0;
  double x_median = 0.0;
  double median_y = 0.0;
  std::size_t count = 0;
  std::optional<double> slope;      // y units per x unit
  std::optional<double> window_r2;
};

struct SensitivityModel {
  std::string cell_id;
  Metric x_metric = Metric::rsrp_dbm;
  Metric y_metric = Metric::app_kbps;
  double bin_width = 2.0;
  std::vector<SensitivityBin> bins;  // populated bins, strictly increasing index

  const SensitivityBin* bin_at(double x) const;
  double support_low() const;
  double support_high() const;
};

/// Per-bin median y over fixed-width x bins; the slope of bin k is the
/// count-weighted least-squares slope over populated bins k-2..k+2, regressing
/// median y on the bins' median x. Throws Error(insufficient_data) below
/// params.min_total points or when no bin reaches params.min_bin_samples.
SensitivityModel fit_sensitivity(std::span<const XYPoint> points, std::string cell_id, Metric x_metric,
                                 Metric y_metric, const SensitivityParams& params);

/// Slope of the populated bin containing x; absent outside the populated
/// range, in gaps, or where the window was too thin.
std::optional<double> local_slope(const SensitivityModel& model, double x);

struct UpliftSegment {
  std::int64_t bin_index = 0;
  double from = 0.0;
  double to = 0.0;
  std::optional<double> slope;  // absent: contributed zero
  double contribution = 0.0;
};

struct UpliftPrediction {
  std::string cell_id;
  double x_from = 0.0;
  double x_to = 0.0;
  double predicted_delta_y = 0.0;
  std::vector<UpliftSegment> path;
  bool crosses_undefined = false;
};

/// Integrates local slopes over [x_from, x_from + delta_x]. Negative deltas
/// integrate downward and give the negated integral. Segments outside the
/// populated range or with undefined slope contribute zero and are kept in the
/// path. Throws Error(out_of_support) if the interval misses the populated range.
UpliftPrediction predict_uplift(const SensitivityModel& model, double x_from, double delta_x);

struct PriorityWeights {
  double badness = 0.5;
  double sensitivity = 0.5;
  Metric y_metric = Metric::app_kbps;
  Metric x_metric = Metric::rsrp_dbm;
};

struct CellPriority {
  std::string cell_id;
  double score = 0.0;
  double badness_rank = 0.0;      // 1 = worst in scope
  double sensitivity_rank = 0.0;  // 1 = steepest in scope
  std::optional<double> slope;
};

/// score = w1 * badness rank + w2 * |slope| rank, both normalized to [0, 1]
/// by counting strictly better (or flatter) cells. Descending score, then cell_id.
std::vector<CellPriority> prioritize_cells(std::span<const CellProfile> profiles,
                                           const std::map<std::string, SensitivityModel>& models,
                                           const PriorityWeights& weights = {});

}  // namespace ranopt
