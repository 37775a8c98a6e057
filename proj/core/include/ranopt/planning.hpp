// SPDX-License-Identifier: Apache-2.0
//
// Network-planning metrics: suppressed demand from the bending of hourly
// traffic against hourly sample count, weekly growth, upgrade traffic gain,
// weeks to capacity exhaustion, and densification speed gain.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ranopt/aggregation.hpp"
#include "ranopt/stats.hpp"

namespace ranopt {

struct DemandParams {
  double split_quantile = 0.70;
  std::size_t min_points_per_regime = 24;
  double bend_ratio = 0.8;
};

struct SuppressionModel {
  std::string cell_id;
  double split_count = 0.0;
  std::optional<stats::LineFit> low;   // f1: bytes = a1 + b1 * samples
  std::optional<stats::LineFit> high;  // f2
  std::optional<double> slope_ratio;   // b2 / b1
  std::optional<bool> suppressed;      // absent = undetermined
  std::optional<double> slope_diff_t;  // (b1 - b2) / sqrt(se1^2 + se2^2), diagnostic only
  std::size_t n_low = 0;
  std::size_t n_high = 0;

  /// f1 evaluated at x; requires `low`.
  double f1(double x) const { return low->intercept + low->slope * x; }
};

/// Splits hourly points at the split quantile of num_samples (low regime
/// x <= split) and fits OLS of total bytes on num_samples per regime.
SuppressionModel fit_demand_regressions(std::span<const CellHourlyAggregate> hourly,
                                        const DemandParams& params = {});

struct GrowthEstimate {
  std::string cell_id;
  double weekly_increase = 0.0;  // fraction per week (0.02 = 2 %/week)
  std::size_t weeks_observed = 0;
  double residual_rms = 0.0;  // of the log-linear fit
  bool trusted = false;       // at least four usable weeks
};

/// Log-linear least squares on weekly totals; zero weeks are skipped.
/// Throws Error(insufficient_data) with fewer than two usable weeks.
GrowthEstimate estimate_growth(std::span<const double> weekly_counts, std::string cell_id = {});

/// Weekly sample totals over consecutive 168-hour windows ending at the last
/// hour bucket of the cell; a partial leading week is dropped.
std::vector<double> weekly_sample_counts(std::span<const CellHourlyAggregate> hourly);

struct HourPoint {
  std::int64_t hour_bucket = 0;
  double samples = 0.0;
  double bytes = 0.0;
};

/// Hourly points of the most recent complete 168-hour window with at least
/// half of its hours present. Empty when no window qualifies.
std::vector<HourPoint> current_week(std::span<const CellHourlyAggregate> hourly);

struct UpgradeHourDetail {
  double x = 0.0;
  double x_pred = 0.0;
  double f1_pred = 0.0;
  double actual_bytes = 0.0;
};

struct UpgradeGainPrediction {
  std::string cell_id;
  int horizon_weeks = 0;
  double gain_bytes = 0.0;
  double gain_pct = 0.0;  // percent of current traffic
  std::vector<UpgradeHourDetail> hours;
};

/// x_pred = x (1 + g N); gain = sum f1(x_pred) - sum current bytes.
/// Throws Error(invalid_argument) without f1 or with N < 0, and
/// Error(insufficient_data) for an empty week.
UpgradeGainPrediction predict_upgrade_gain(const SuppressionModel& model,
                                           std::span<const HourPoint> current_week_hours,
                                           const GrowthEstimate& growth, int horizon_weeks);

struct BeyondHorizon {};
using WeeksToExhaustion = std::variant<int, BeyondHorizon>;

/// Relative tolerance (percentage points) when comparing gain_pct with the threshold.
inline constexpr double kExhaustionTolerancePct = 1e-9;

/// Smallest N in [0, n_max] with gain_pct(N) >= threshold_pct.
WeeksToExhaustion weeks_to_capacity_exhaustion(const SuppressionModel& model,
                                               std::span<const HourPoint> current_week_hours,
                                               const GrowthEstimate& growth, double threshold_pct = 5.0,
                                               int n_max = 52);

struct DensificationParams {
  std::size_t min_points = 48;
  std::size_t bins = 12;              // equal-width load bins over the observed range
  std::size_t min_bin_points = 3;
};

struct LoadCurvePoint {
  double load = 0.0;       // mean samples/hour in the bin
  double raw_kbps = 0.0;   // bin median
  double fitted_kbps = 0.0;
  std::size_t count = 0;
};

struct DensificationGainPrediction {
  std::string cell_id;
  double busy_load = 0.0;
  double speed_at_load = 0.0;
  double speed_at_half_load = 0.0;
  double gain_kbps = 0.0;
  bool extrapolated = false;
  std::vector<LoadCurvePoint> curve;
};

/// Speed-vs-load curve from binned medians made non-increasing by pool
/// adjacent violators, evaluated by linear interpolation at the busy-hour load
/// and at half of it. Throws Error(insufficient_data) below min_points.
DensificationGainPrediction predict_densification_gain(std::span<const CellHourlyAggregate> hourly,
                                                       const BusyHourLabeling& labeling,
                                                       const DensificationParams& params = {});

struct PlanningCandidate {
  std::string cell_id;
  std::optional<double> gain_bytes;
  std::optional<double> densification_gain_kbps;
  std::optional<double> congestion_pct;
};

/// Descending gain_bytes, densification gain, congestion; then cell_id.
/// Absent keys sort after present ones. Truncated to budget_limit when given.
std::vector<PlanningCandidate> rank_planning_candidates(std::vector<PlanningCandidate> cells,
                                                        std::optional<std::size_t> budget_limit = {});

}  // namespace ranopt
