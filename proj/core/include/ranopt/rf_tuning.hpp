// SPDX-License-Identifier: Apache-2.0
//
// Azimuth retargeting from sample geo-centroids, configuration audits
// (site coordinates, swapped sectors) and post-tuning experience prediction
// through the horizontal antenna pattern.

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ranopt/sensitivity.hpp"
#include "ranopt/types.hpp"

namespace ranopt {

struct GeoSummaryParams {
  std::size_t min_geo_samples = 100;
  bool weight_by_bytes = false;
};

struct CellGeoSummary {
  std::string cell_id;
  GeoPoint centroid;
  double site_to_centroid_m = 0.0;
  double bearing_site_to_centroid_deg = 0.0;
  double radius_p90_m = 0.0;
  std::size_t n_located_samples = 0;
  bool low_confidence = false;
};

/// Centroid is the mean east/north offset of located samples in the site's
/// tangent plane. Only samples of `cell` are used. Throws Error(no_geo_data)
/// when none is located.
CellGeoSummary cell_geo_summary(std::span<const MeasurementSample> samples, const SiteConfig& site,
                                const CellConfig& cell, const GeoSummaryParams& params = {});

struct AzimuthRecommendation {
  std::string cell_id;
  std::string site_id;
  int sector_id = 0;
  double current_azimuth_deg = 0.0;
  double recommended_azimuth_deg = 0.0;
  double delta_deg = 0.0;  // (-180, 180], positive = clockwise
  bool low_confidence = false;
};

AzimuthRecommendation recommend_azimuth(const CellGeoSummary& summary, const SiteConfig& site,
                                        const CellConfig& cell);

enum class AuditKind { site_location_suspect, sector_swap_suspect };
enum class AuditStrength { weak, strong };
std::string_view to_string(AuditKind kind);
std::string_view to_string(AuditStrength strength);

struct AuditEvidence {
  std::string cell_id;
  int sector_id = 0;
  double value = 0.0;  // site-to-centroid distance (m) or azimuth delta (deg)
  std::optional<double> recorded_azimuth_deg;
  std::optional<double> corrected_azimuth_deg;
};

struct ConfigAudit {
  AuditKind kind = AuditKind::site_location_suspect;
  std::string site_id;
  AuditStrength strength = AuditStrength::weak;
  std::vector<AuditEvidence> evidence;
};

/// Evidence = cells whose centroid is farther than the threshold from the
/// recorded site. Strong when every cell (and at least two) is evidence.
std::optional<ConfigAudit> audit_site_location(const SiteConfig& site,
                                               std::span<const CellGeoSummary> summaries,
                                               double distance_threshold_m = 10000.0);

struct SwapParams {
  double min_abs_deg = 45.0;
  double sym_tol_deg = 15.0;
  bool skip_low_confidence = true;
};

/// Pairs on one site whose deltas have opposite signs, both magnitudes at
/// least min_abs and magnitudes within sym_tol of each other. The evidence
/// carries the corrected record (the two recorded azimuths exchanged).
std::vector<ConfigAudit> detect_sector_swap(std::span<const AzimuthRecommendation> site_recommendations,
                                            const SwapParams& params = {});

struct AntennaPattern {
  double beamwidth_3db_deg = 70.0;
  double max_attenuation_db = 25.0;
};

/// -min(12 (offset / theta_3dB)^2, A_m); the offset is folded into [0, 180].
double horizontal_antenna_gain(double offset_deg, const AntennaPattern& pattern = {});

struct PostTuningPrediction {
  std::string cell_id;
  double delta_azimuth_deg = 0.0;
  double rsrp_gain_median_db = 0.0;
  double rsrp_gain_p10_db = 0.0;
  double rsrp_gain_p90_db = 0.0;
  std::optional<double> predicted_delta_kbps;
  std::optional<double> predicted_delta_rtt_ms;
  std::size_t n_samples = 0;
  std::size_t n_out_of_support = 0;  // samples whose uplift fell outside the model
};

/// Horizontal-pattern rsrp gain per located sample, mapped to experience
/// deltas through the sensitivity models (median over samples). A zero delta
/// yields exact zeros. Throws Error(no_geo_data) with no located rsrp sample.
PostTuningPrediction predict_post_tuning(const SiteConfig& site, const CellConfig& cell,
                                         std::span<const MeasurementSample> samples,
                                         double delta_azimuth_deg, const SensitivityModel* kbps_model,
                                         const SensitivityModel* rtt_model,
                                         const AntennaPattern& pattern = {});

struct OptimizationParams {
  std::size_t k = 5;
  double cooldown_days = 7.0;
  PriorityWeights weights;
};

struct TuningBatchEntry {
  CellPriority priority;
  std::optional<AzimuthRecommendation> recommendation;
  std::optional<PostTuningPrediction> prediction;
};

/// Top-k cells by priority, skipping cells tuned within the cooldown window
/// before `now` (last_tuned maps cell_id to its latest action time).
std::vector<TuningBatchEntry> iterate_optimization(
    std::span<const CellProfile> profiles, const std::map<std::string, SensitivityModel>& models,
    const std::map<std::string, AzimuthRecommendation>& recommendations,
    const std::map<std::string, PostTuningPrediction>& predictions,
    const std::map<std::string, EpochSeconds>& last_tuned, EpochSeconds now,
    const OptimizationParams& params = {});

}  // namespace ranopt
