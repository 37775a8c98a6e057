// SPDX-License-Identifier: Apache-2.0
//
// Builders and fixtures shared by the test binaries.

#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "ranopt/aggregation.hpp"
#include "ranopt/pipeline.hpp"
#include "ranopt/synth.hpp"
#include "ranopt/types.hpp"

namespace ranopt::test {

inline MeasurementSample sample(std::string cell, EpochSeconds ts, std::optional<double> kbps,
                                std::optional<double> rsrp = std::nullopt) {
  MeasurementSample s;
  s.site_id = cell.substr(0, cell.find('-'));
  s.cell_id = std::move(cell);
  s.timestamp = ts;
  s.app_kbps = kbps;
  s.rsrp_dbm = rsrp;
  return s;
}

inline CellHourlyAggregate hour(std::string cell, std::int64_t bucket, std::size_t n, double bytes,
                                std::optional<double> kbps = std::nullopt) {
  CellHourlyAggregate h;
  h.cell_id = std::move(cell);
  h.hour_bucket = bucket;
  h.num_samples = n;
  h.total_bytes = bytes;
  h.median_kbps = kbps;
  return h;
}

inline CellProfile profile(std::string cell, std::optional<double> kbps, std::optional<double> rsrp = {},
                           std::optional<double> rsrq = {}, std::optional<double> congestion = {},
                           std::optional<double> rtt = {}) {
  CellProfile p;
  p.cell_id = std::move(cell);
  p.median_kbps = kbps;
  p.median_rsrp_dbm = rsrp;
  p.median_rsrq_db = rsrq;
  p.congestion_indicator_pct = congestion;
  p.median_rtt_ms = rtt;
  return p;
}

inline bool near_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("ranopt-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Reference scenario (seed 42), generated once per process.
inline const GeneratedScenario& reference() {
  static const GeneratedScenario scenario = generate_scenario(reference_scenario());
  return scenario;
}

inline Dataset reference_dataset() { return {reference().samples, reference().sites}; }

/// Pipeline output on the reference scenario, computed once per process.
inline const AnalysisSnapshot& reference_snapshot() {
  static const AnalysisSnapshot snap = run_pipeline(reference_dataset());
  return snap;
}

}  // namespace ranopt::test
