// SPDX-License-Identifier: Apache-2.0

#include "ranopt/rf_tuning.hpp"

#include <algorithm>
#include <cmath>

#include "ranopt/error.hpp"
#include "ranopt/geo.hpp"
#include "ranopt/stats.hpp"

namespace ranopt {

CellGeoSummary cell_geo_summary(std::span<const MeasurementSample> samples, const SiteConfig& site,
                                const CellConfig& cell, const GeoSummaryParams& params) {
  std::vector<geo::Enu> offsets;
  std::vector<double> weights;
  for (const auto& s : samples) {
    if (s.cell_id != cell.cell_id || !s.location) continue;
    offsets.push_back(geo::to_local(site.location, *s.location));
    weights.push_back(params.weight_by_bytes ? s.bytes.value_or(0.0) : 1.0);
  }
  if (offsets.empty()) throw Error(ErrorCode::no_geo_data, "no located samples for " + cell.cell_id);

  double sw = 0.0;
  for (double w : weights) sw += w;
  if (!(sw > 0.0)) {
    std::fill(weights.begin(), weights.end(), 1.0);
    sw = static_cast<double>(weights.size());
  }
  geo::Enu mean;
  std::vector<double> distances;
  distances.reserve(offsets.size());
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    mean.east += weights[i] * offsets[i].east;
    mean.north += weights[i] * offsets[i].north;
    distances.push_back(geo::horizontal_distance_m(offsets[i]));
  }
  mean.east /= sw;
  mean.north /= sw;

  CellGeoSummary summary;
  summary.cell_id = cell.cell_id;
  summary.centroid = geo::from_local(site.location, mean);
  summary.site_to_centroid_m = geo::horizontal_distance_m(mean);
  summary.bearing_site_to_centroid_deg = geo::bearing_deg(mean);
  summary.radius_p90_m = *stats::quantile(distances, 0.9);
  summary.n_located_samples = offsets.size();
  summary.low_confidence = offsets.size() < params.min_geo_samples;
  return summary;
}

AzimuthRecommendation recommend_azimuth(const CellGeoSummary& summary, const SiteConfig& site,
                                        const CellConfig& cell) {
  AzimuthRecommendation rec;
  rec.cell_id = cell.cell_id;
  rec.site_id = site.site_id;
  rec.sector_id = cell.sector_id;
  rec.current_azimuth_deg = geo::quantize_azimuth(cell.azimuth_deg);
  rec.recommended_azimuth_deg = geo::quantize_azimuth(summary.bearing_site_to_centroid_deg);
  rec.delta_deg = geo::azimuth_delta(rec.current_azimuth_deg, rec.recommended_azimuth_deg);
  rec.low_confidence = summary.low_confidence;
  return rec;
}

std::string_view to_string(AuditKind kind) {
  return kind == AuditKind::site_location_suspect ? "site_location_suspect" : "sector_swap_suspect";
}

std::string_view to_string(AuditStrength strength) {
  return strength == AuditStrength::strong ? "strong" : "weak";
}

std::optional<ConfigAudit> audit_site_location(const SiteConfig& site,
                                               std::span<const CellGeoSummary> summaries,
                                               double distance_threshold_m) {
  ConfigAudit audit;
  audit.kind = AuditKind::site_location_suspect;
  audit.site_id = site.site_id;
  for (const auto& s : summaries) {
    if (s.site_to_centroid_m <= distance_threshold_m) continue;
    int sector = 0;
    for (const auto& c : site.cells) {
      if (c.cell_id == s.cell_id) sector = c.sector_id;
    }
    audit.evidence.push_back({s.cell_id, sector, s.site_to_centroid_m, std::nullopt, std::nullopt});
  }
  if (audit.evidence.empty()) return std::nullopt;
  audit.strength = audit.evidence.size() == summaries.size() && summaries.size() >= 2
                       ? AuditStrength::strong
                       : AuditStrength::weak;
  return audit;
}

std::vector<ConfigAudit> detect_sector_swap(std::span<const AzimuthRecommendation> site_recommendations,
                                            const SwapParams& params) {
  std::vector<AzimuthRecommendation> recs;
  for (const auto& r : site_recommendations) {
    if (params.skip_low_confidence && r.low_confidence) continue;
    recs.push_back(r);
  }
  std::sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) {
    if (a.sector_id != b.sector_id) return a.sector_id < b.sector_id;
    return a.cell_id < b.cell_id;
  });

  std::vector<ConfigAudit> audits;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    for (std::size_t j = i + 1; j < recs.size(); ++j) {
      const auto& a = recs[i];
      const auto& b = recs[j];
      const double da = a.delta_deg, db = b.delta_deg;
      const bool opposite = (da > 0 && db < 0) || (da < 0 && db > 0);
      if (!opposite) continue;
      if (std::abs(da) < params.min_abs_deg || std::abs(db) < params.min_abs_deg) continue;
      if (std::abs(std::abs(da) - std::abs(db)) > params.sym_tol_deg) continue;

      ConfigAudit audit;
      audit.kind = AuditKind::sector_swap_suspect;
      audit.site_id = a.site_id;
      // Strong when each recommendation lands near the partner's recorded azimuth.
      const bool a_fits = std::abs(geo::azimuth_delta(b.current_azimuth_deg, a.recommended_azimuth_deg)) <=
                          params.sym_tol_deg;
      const bool b_fits = std::abs(geo::azimuth_delta(a.current_azimuth_deg, b.recommended_azimuth_deg)) <=
                          params.sym_tol_deg;
      audit.strength = a_fits && b_fits ? AuditStrength::strong : AuditStrength::weak;
      audit.evidence.push_back({a.cell_id, a.sector_id, da, a.current_azimuth_deg, b.current_azimuth_deg});
      audit.evidence.push_back({b.cell_id, b.sector_id, db, b.current_azimuth_deg, a.current_azimuth_deg});
      audits.push_back(std::move(audit));
    }
  }
  return audits;
}

double horizontal_antenna_gain(double offset_deg, const AntennaPattern& pattern) {
  const double off = std::abs(geo::wrap_delta_deg(offset_deg));
  const double ratio = off / pattern.beamwidth_3db_deg;
  return -std::min(12.0 * ratio * ratio, pattern.max_attenuation_db);
}

namespace {

double uplift_or_zero(const SensitivityModel& model, double x, double dx, std::size_t& misses) {
  if (dx == 0.0) return 0.0;
  try {
    return predict_uplift(model, x, dx).predicted_delta_y;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::out_of_support) throw;
    ++misses;
    return 0.0;
  }
}

}  // namespace

PostTuningPrediction predict_post_tuning(const SiteConfig& site, const CellConfig& cell,
                                         std::span<const MeasurementSample> samples,
                                         double delta_azimuth_deg, const SensitivityModel* kbps_model,
                                         const SensitivityModel* rtt_model, const AntennaPattern& pattern) {
  PostTuningPrediction pred;
  pred.cell_id = cell.cell_id;
  pred.delta_azimuth_deg = delta_azimuth_deg;

  std::vector<double> gains, rsrps;
  const double before_az = cell.azimuth_deg;
  const double after_az = geo::normalize_deg(cell.azimuth_deg + delta_azimuth_deg);
  for (const auto& s : samples) {
    if (s.cell_id != cell.cell_id || !s.location || !s.rsrp_dbm) continue;
    const double bearing = geo::bearing_deg(geo::to_local(site.location, *s.location));
    double gain = 0.0;
    if (delta_azimuth_deg != 0.0) {
      gain = horizontal_antenna_gain(bearing - after_az, pattern) -
             horizontal_antenna_gain(bearing - before_az, pattern);
    }
    gains.push_back(gain);
    rsrps.push_back(*s.rsrp_dbm);
  }
  if (gains.empty()) throw Error(ErrorCode::no_geo_data, "no located rsrp samples for " + cell.cell_id);
  pred.n_samples = gains.size();

  if (delta_azimuth_deg == 0.0) {
    pred.predicted_delta_kbps = 0.0;
    pred.predicted_delta_rtt_ms = 0.0;
    return pred;
  }
  pred.rsrp_gain_median_db = *stats::median(gains);
  pred.rsrp_gain_p10_db = *stats::quantile(gains, 0.1);
  pred.rsrp_gain_p90_db = *stats::quantile(gains, 0.9);

  std::size_t misses = 0;
  if (kbps_model) {
    std::vector<double> deltas;
    deltas.reserve(gains.size());
    for (std::size_t i = 0; i < gains.size(); ++i) {
      deltas.push_back(uplift_or_zero(*kbps_model, rsrps[i], gains[i], misses));
    }
    pred.predicted_delta_kbps = stats::median(deltas);
  }
  pred.n_out_of_support = misses;
  if (rtt_model) {
    std::size_t rtt_misses = 0;
    std::vector<double> deltas;
    deltas.reserve(gains.size());
    for (std::size_t i = 0; i < gains.size(); ++i) {
      deltas.push_back(uplift_or_zero(*rtt_model, rsrps[i], gains[i], rtt_misses));
    }
    pred.predicted_delta_rtt_ms = stats::median(deltas);
    if (!kbps_model) pred.n_out_of_support = rtt_misses;
  }
  return pred;
}

std::vector<TuningBatchEntry> iterate_optimization(
    std::span<const CellProfile> profiles, const std::map<std::string, SensitivityModel>& models,
    const std::map<std::string, AzimuthRecommendation>& recommendations,
    const std::map<std::string, PostTuningPrediction>& predictions,
    const std::map<std::string, EpochSeconds>& last_tuned, EpochSeconds now,
    const OptimizationParams& params) {
  const auto cooldown = static_cast<EpochSeconds>(std::llround(params.cooldown_days * 86400.0));
  std::vector<TuningBatchEntry> batch;
  for (const auto& priority : prioritize_cells(profiles, models, params.weights)) {
    if (batch.size() >= params.k) break;
    if (auto it = last_tuned.find(priority.cell_id); it != last_tuned.end()) {
      if (it->second > now - cooldown) continue;
    }
    TuningBatchEntry entry{priority, std::nullopt, std::nullopt};
    if (auto r = recommendations.find(priority.cell_id); r != recommendations.end()) {
      entry.recommendation = r->second;
    }
    if (auto p = predictions.find(priority.cell_id); p != predictions.end()) entry.prediction = p->second;
    batch.push_back(std::move(entry));
  }
  return batch;
}

}  // namespace ranopt
