// SPDX-License-Identifier: Apache-2.0
//
// Deterministic synthetic datasets with planted ground truth, and a scorecard
// that compares engine output against that truth.
//
// Generation model per cell:
//   hourly sample count ~ Poisson(diurnal[hour] * (1 + growth)^(hours / 168))
//   user position: bearing ~ N(cloud bearing, spread), distance log-normal
//   rsrp = rsrp_at_100m + tx_offset - 10 * exponent * log10(d / 100)
//          + antenna gain(bearing - true boresight) + shadowing
//   kbps = curve(rsrp - reference) + noise - depression * base [depressed hour]
//   bytes per sample = f(x) / x with f(x) = rate * x below the knee x0 and
//          rate * (x0 + fraction * (x - x0)) above it (x = samples that hour)
// Depressed hours are those whose diurnal level exceeds the cell's minimum.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ranopt/detection.hpp"
#include "ranopt/pipeline.hpp"
#include "ranopt/rf_tuning.hpp"
#include "ranopt/types.hpp"

namespace ranopt {

enum class KbpsCurve {
  linear,      // base + slope * u
  saturating,  // base + slope * scale * (1 - exp(-u / scale)); slope at u = 0 equals `slope`
};

std::string_view to_string(KbpsCurve curve);

struct CellPlan {
  std::string cell_id;
  int sector_id = 0;
  double true_boresight_deg = 0.0;
  double recorded_azimuth_deg = 0.0;

  double cloud_bearing_deg = 0.0;  // absolute bearing of the user cloud center
  double cloud_distance_m = 600.0;
  double cloud_bearing_spread_deg = 20.0;
  double cloud_distance_spread = 0.2;  // sd of log(distance)

  std::array<double, 24> diurnal{};  // mean samples per hour of day in week 0

  double base_kbps = 10000.0;
  double busy_depression = 0.0;  // fraction of base removed in depressed hours
  KbpsCurve curve = KbpsCurve::linear;
  double kbps_per_db = 200.0;
  double saturation_scale_db = 20.0;
  double kbps_noise_sd = 150.0;

  double tx_offset_db = 0.0;
  double rsrq_base_db = -9.0;
  double rtt_base_ms = 40.0;

  std::optional<double> knee_x0;  // absent: 70th percentile of the cell's realized hourly counts
  double knee_fraction = 1.0;     // post-knee slope as a fraction of the pre-knee slope
  double bytes_per_sample = 50000.0;

  double weekly_growth = 0.0;

  std::optional<CauseLabel> fault;  // planted root cause, if any
  bool planted_worst_kbps = false;
};

struct SitePlan {
  std::string site_id;
  GeoPoint location;  // true position
  double antenna_height_m = 30.0;
  double coordinate_error_m = 0.0;  // recorded position is displaced by this much
  double coordinate_error_bearing_deg = 0.0;
  std::vector<CellPlan> cells;
};

struct SwapPlan {
  std::string cell_a;
  std::string cell_b;
};

struct ScenarioSpec {
  std::string scenario_id;
  std::uint64_t seed = 1;
  EpochSeconds start = 1699920000;  // a UTC midnight
  int days = 14;
  double located_fraction = 0.9;
  double rtt_missing_fraction = 0.02;
  double rsrp_at_100m_dbm = -65.0;
  double path_loss_exponent = 3.5;
  double shadowing_sd_db = 3.0;
  double bytes_noise = 0.0;  // relative sd of per-sample bytes
  AntennaPattern pattern;
  std::vector<SitePlan> sites;
  std::vector<SwapPlan> swaps;  // pairs whose recorded azimuths are exchanged
};

/// Throws Error(validation) whose message starts with the offending field path.
void validate(const ScenarioSpec& spec);

struct ReferenceOptions {
  std::uint64_t seed = 42;
  int n_sites = 20;
  int cells_per_site = 3;
  int days = 14;
  double bytes_noise = 0.0;
};

/// Reference field: sites on a 2 km grid, a sector swap on the first site, a
/// misaimed cell on the second, a 30 km coordinate error on the eighth,
/// coverage/capacity/quality faults on three cells, congestion on fifteen,
/// suppression knees on every fifth cell and 2 %/week growth on every third.
ScenarioSpec reference_scenario(const ReferenceOptions& options = {});

struct CellTruth {
  std::string cell_id;
  std::string site_id;
  int sector_id = 0;
  double true_boresight_deg = 0.0;
  double recorded_azimuth_deg = 0.0;
  double cloud_bearing_deg = 0.0;
  double expected_azimuth_delta_deg = 0.0;
  bool azimuth_checkable = true;  // false when the site's recorded position is wrong
  std::size_t n_samples = 0;
  std::size_t n_located = 0;

  double base_kbps = 0.0;
  double busy_depression = 0.0;
  double expected_congestion_pct = 0.0;
  KbpsCurve curve = KbpsCurve::linear;
  double kbps_per_db = 0.0;
  double saturation_scale_db = 0.0;
  double rsrp_reference_dbm = 0.0;  // median generated rsrp; u = rsrp - reference

  double knee_x0 = 0.0;
  double knee_fraction = 1.0;
  bool expected_suppressed = false;
  double expected_slope_ratio = 1.0;
  double weekly_growth = 0.0;
  std::map<int, double> expected_gain_bytes;  // horizon weeks -> bytes

  std::optional<CauseLabel> fault;
  bool planted_worst_kbps = false;

  /// Noise-free kbps outside depressed hours at a given rsrp.
  double expected_kbps(double rsrp_dbm) const;
  /// Derivative of expected_kbps.
  double expected_slope(double rsrp_dbm) const;
};

struct SiteTruth {
  std::string site_id;
  double coordinate_error_m = 0.0;
  bool expected_strong_location_audit = false;
};

struct SwapTruth {
  std::string site_id;
  std::string cell_a;
  std::string cell_b;
  double corrected_a_deg = 0.0;  // the partner's recorded azimuth
  double corrected_b_deg = 0.0;
};

inline constexpr int kGroundTruthVersion = 1;

struct GroundTruth {
  int version = kGroundTruthVersion;
  std::string scenario_id;
  std::uint64_t seed = 0;
  std::string dataset_digest;
  EpochSeconds start = 0;
  int days = 0;
  double bytes_noise = 0.0;
  std::vector<CellTruth> cells;
  std::vector<SiteTruth> sites;
  std::vector<SwapTruth> swaps;

  const CellTruth* cell(std::string_view cell_id) const;
};

struct GeneratedScenario {
  std::vector<MeasurementSample> samples;  // site order, cell order, time order
  std::vector<SiteConfig> sites;           // recorded configuration
  GroundTruth truth;
};

/// Pure function of the spec. Throws Error(validation) for an invalid spec.
GeneratedScenario generate_scenario(const ScenarioSpec& spec);

/// Writes samples.csv, sites.csv and truth.jsonl into `dir` (created if needed).
void write_scenario_files(const GeneratedScenario& scenario, const std::filesystem::path& dir);

/// Ground-truth file: a header record {"schema", "version", ...} followed by
/// one record per cell, site and swap pair, each tagged by "record".
void write_ground_truth(std::ostream& out, const GroundTruth& truth);
GroundTruth read_ground_truth(std::istream& in);
GroundTruth read_ground_truth_file(const std::filesystem::path& path);

struct ScoreCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;   // worst observed error (or the rate being bounded)
  double tolerance = 0.0;
  std::string detail;      // failing cells or a short summary
};

struct Scorecard {
  std::string scenario_id;
  std::vector<ScoreCheck> checks;
  bool all_passed() const;
};

/// Compares a snapshot with the ground truth of the scenario it was run on.
/// Throws Error(scenario_mismatch) when the snapshot's dataset digest differs
/// from the truth's (an empty snapshot digest is accepted so that an empty
/// engine output scores as all-fail).
Scorecard evaluate_engine(const GroundTruth& truth, const AnalysisSnapshot& snapshot);

}  // namespace ranopt
