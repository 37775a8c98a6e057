// SPDX-License-Identifier: Apache-2.0
//
// Shared domain types for the RAN experience analytics engine.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ranopt {

using EpochSeconds = std::int64_t;

struct GeoPoint {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// One deidentified app-layer measurement with its radio context.
/// Every metric is optional; absence is never encoded as a sentinel.
struct MeasurementSample {
  std::string cell_id;
  std::string site_id;
  int sector_id = 0;
  EpochSeconds timestamp = 0;
  std::optional<GeoPoint> location;
  std::optional<double> app_kbps;
  std::optional<double> rtt_ms;
  std::optional<double> rsrp_dbm;
  std::optional<double> rsrq_db;
  std::optional<double> sinr_db;
  std::optional<double> bytes;

  friend bool operator==(const MeasurementSample&, const MeasurementSample&) = default;
};

struct CellConfig {
  std::string cell_id;
  int sector_id = 0;
  double azimuth_deg = 0.0;  // clockwise from true north, [0, 360)
  std::optional<double> tilt_deg;
  std::optional<double> tx_power_dbm;

  friend bool operator==(const CellConfig&, const CellConfig&) = default;
};

struct SiteConfig {
  std::string site_id;
  GeoPoint location;
  double antenna_height_m = 0.0;
  std::vector<CellConfig> cells;

  friend bool operator==(const SiteConfig&, const SiteConfig&) = default;
};

enum class RejectReason { out_of_range, missing_key_field, unparseable };

std::string_view to_string(RejectReason reason);

struct RejectRecord {
  std::size_t line_number = 0;  // 1-based, counting the header line
  RejectReason reason = RejectReason::unparseable;
  std::string detail;
  std::string raw;
};

/// Per-sample and per-cell metrics that rules, models and time series refer to.
enum class Metric { app_kbps, rtt_ms, rsrp_dbm, rsrq_db, congestion_pct, num_samples, total_bytes };

std::string_view to_string(Metric metric);
std::optional<Metric> metric_from_string(std::string_view name);

/// Value of a per-sample metric, absent when the sample does not carry it.
std::optional<double> sample_metric(const MeasurementSample& sample, Metric metric);

struct TimeWindow {
  EpochSeconds start = 0;  // inclusive
  EpochSeconds end = 0;    // exclusive

  bool contains(EpochSeconds t) const { return t >= start && t < end; }
  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

}  // namespace ranopt
