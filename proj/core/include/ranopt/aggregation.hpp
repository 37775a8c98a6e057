// SPDX-License-Identifier: Apache-2.0
//
// Cell-hour rollups, busy-hour labeling, per-cell window profiles and the
// experience-based congestion indicator.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ranopt/types.hpp"

namespace ranopt {

inline constexpr EpochSeconds kSecondsPerHour = 3600;

/// floor(t / 3600), correct for negative epochs.
std::int64_t hour_bucket_of(EpochSeconds t);
/// UTC hour of day of a bucket, 0..23.
int hour_of_day(std::int64_t bucket);

struct CellHourlyAggregate {
  std::string cell_id;
  std::int64_t hour_bucket = 0;
  std::size_t num_samples = 0;
  double total_bytes = 0.0;
  std::optional<double> median_kbps;
  std::optional<double> median_rtt_ms;
  std::optional<double> median_rsrp_dbm;
  std::optional<double> median_rsrq_db;

  friend bool operator==(const CellHourlyAggregate&, const CellHourlyAggregate&) = default;
};

/// One aggregate per (cell_id, hour_bucket), sorted by that key. Medians use
/// present values only; total_bytes sums present byte counts.
std::vector<CellHourlyAggregate> aggregate_hourly(std::span<const MeasurementSample> samples);

struct BusyHourParams {
  int min_days = 7;
};

struct BusyHourLabeling {
  std::string cell_id;
  std::set<int> busy_hours;
  std::set<int> nonbusy_hours;
  std::array<double, 24> mean_count{};
  std::size_t days_observed = 0;
  bool insufficient_data = false;
};

/// Hour-of-day classes from mean hourly sample counts: busy at or above the
/// 75th percentile of the 24 means, non-busy at or below the 25th. An hour
/// meeting both thresholds goes to busy when above the median of the 24
/// means, to non-busy when below it, and to neither when equal.
BusyHourLabeling label_busy_hours(std::span<const CellHourlyAggregate> hourly, std::string_view cell_id,
                                  const BusyHourParams& params = {});

/// max(0, (A - B) / A * 100). Absent when either input is absent or A <= 0.
std::optional<double> congestion_indicator(std::optional<double> nonbusy_kbps,
                                           std::optional<double> busy_kbps);

struct ProfileParams {
  std::size_t min_class_samples = 50;
};

struct CellProfile {
  std::string cell_id;
  TimeWindow window;
  std::size_t num_samples = 0;
  std::optional<double> median_kbps;
  std::optional<double> median_rtt_ms;
  std::optional<double> median_rsrp_dbm;
  std::optional<double> median_rsrq_db;
  std::optional<double> nonbusy_speed_kbps;  // A
  std::optional<double> busy_speed_kbps;     // B
  std::optional<double> congestion_indicator_pct;

  /// Value of a profile metric (congestion_pct included); nullopt when absent.
  std::optional<double> metric(Metric m) const;
};

/// A and B are medians of hourly median speeds over non-busy and busy hour
/// buckets. Window medians come from `samples` when given (sample-level
/// medians), otherwise from the hourly medians.
CellProfile build_cell_profile(std::span<const CellHourlyAggregate> hourly,
                               std::span<const MeasurementSample> samples,
                               const BusyHourLabeling& labeling, TimeWindow window,
                               const ProfileParams& params = {});

struct WeightedIndicator {
  std::string cell_id;
  std::optional<double> indicator_pct;
  double weight = 0.0;
};

struct AreaCongestion {
  std::string area_id;
  double congestion_indicator_pct = 0.0;
  std::vector<WeightedIndicator> contributors;  // cells with a present indicator
};

/// Weight-normalized mean over cells with a present indicator.
std::optional<AreaCongestion> area_congestion(std::string area_id,
                                              std::span<const WeightedIndicator> cells);

}  // namespace ranopt
