// SPDX-License-Identifier: Apache-2.0

#include "ranopt/report.hpp"

#include <ostream>

#include "json_io.hpp"
#include "ranopt/digest.hpp"

namespace ranopt {

namespace {

constexpr std::pair<ReportFamily, std::string_view> kFamilies[] = {
    {ReportFamily::cells, "cells"},
    {ReportFamily::anomalies, "anomalies"},
    {ReportFamily::sensitivity, "sensitivity"},
    {ReportFamily::recommendations, "recommendations"},
    {ReportFamily::tuning, "tuning"},
    {ReportFamily::audits, "audits"},
    {ReportFamily::planning, "planning"},
    {ReportFamily::hourly, "hourly"},
    {ReportFamily::errors, "errors"},
};

json line_fit(const std::optional<stats::LineFit>& fit) {
  if (!fit) return nullptr;
  return {{"intercept", fit->intercept},
          {"slope", fit->slope},
          {"r_squared", fit->r_squared},
          {"slope_std_error", fit->slope_std_error},
          {"n", fit->n}};
}

json geo_record(const CellGeoSummary& g) {
  return {{"centroid", {{"lat", g.centroid.lat}, {"lon", g.centroid.lon}}},
          {"site_to_centroid_m", g.site_to_centroid_m},
          {"bearing_site_to_centroid_deg", g.bearing_site_to_centroid_deg},
          {"radius_p90_m", g.radius_p90_m},
          {"n_located_samples", g.n_located_samples},
          {"low_confidence", g.low_confidence}};
}

json prediction_record(const PostTuningPrediction& p) {
  return {{"delta_azimuth_deg", p.delta_azimuth_deg},
          {"rsrp_gain_median_db", p.rsrp_gain_median_db},
          {"rsrp_gain_p10_db", p.rsrp_gain_p10_db},
          {"rsrp_gain_p90_db", p.rsrp_gain_p90_db},
          {"predicted_delta_kbps", opt(p.predicted_delta_kbps)},
          {"predicted_delta_rtt_ms", opt(p.predicted_delta_rtt_ms)},
          {"n_samples", p.n_samples},
          {"n_out_of_support", p.n_out_of_support}};
}

json priority_record(const CellPriority& p) {
  return {{"score", p.score},
          {"badness_rank", p.badness_rank},
          {"sensitivity_rank", p.sensitivity_rank},
          {"slope", opt(p.slope)}};
}

json recommendation_record(const AzimuthRecommendation& r) {
  return {{"cell_id", r.cell_id},
          {"site_id", r.site_id},
          {"sector_id", r.sector_id},
          {"current_azimuth_deg", r.current_azimuth_deg},
          {"recommended_azimuth_deg", r.recommended_azimuth_deg},
          {"delta_deg", r.delta_deg},
          {"low_confidence", r.low_confidence}};
}

std::vector<json> records(const AnalysisSnapshot& snap, ReportFamily family) {
  std::vector<json> out;
  switch (family) {
    case ReportFamily::cells:
      for (std::size_t i = 0; i < snap.profiles.size(); ++i) {
        const auto& p = snap.profiles[i];
        const auto& l = snap.labelings[i];
        out.push_back({{"cell_id", p.cell_id},
                       {"window", {{"start", p.window.start}, {"end", p.window.end}}},
                       {"num_samples", p.num_samples},
                       {"median_kbps", opt(p.median_kbps)},
                       {"median_rtt_ms", opt(p.median_rtt_ms)},
                       {"median_rsrp_dbm", opt(p.median_rsrp_dbm)},
                       {"median_rsrq_db", opt(p.median_rsrq_db)},
                       {"nonbusy_speed_kbps", opt(p.nonbusy_speed_kbps)},
                       {"busy_speed_kbps", opt(p.busy_speed_kbps)},
                       {"congestion_indicator_pct", opt(p.congestion_indicator_pct)},
                       {"busy_hours", l.busy_hours},
                       {"nonbusy_hours", l.nonbusy_hours},
                       {"days_observed", l.days_observed},
                       {"busy_hours_insufficient", l.insufficient_data}});
      }
      break;
    case ReportFamily::anomalies:
      for (std::size_t i = 0; i < snap.anomalies.size(); ++i) {
        const auto& a = snap.anomalies[i];
        json causes = json::array();
        bool unexplained = true;
        if (i < snap.root_causes.size()) {
          unexplained = snap.root_causes[i].unexplained();
          for (const auto& c : snap.root_causes[i].causes) {
            causes.push_back({{"label", std::string(to_string(c.label))},
                              {"evidence", std::string(to_string(c.evidence))},
                              {"percentile", c.percentile},
                              {"slope", opt(c.slope)}});
          }
        }
        out.push_back({{"cell_id", a.cell_id},
                       {"metric", std::string(to_string(a.metric))},
                       {"observed", a.observed},
                       {"rule", a.rule.describe()},
                       {"severity", a.severity},
                       {"causes", causes},
                       {"unexplained", unexplained}});
      }
      break;
    case ReportFamily::sensitivity:
      for (const auto& m : snap.sensitivity) {
        json bins = json::array();
        for (const auto& b : m.bins) {
          bins.push_back({{"index", b.index},
                          {"x_center", b.x_center},
                          {"x_median", b.x_median},
                          {"median_y", b.median_y},
                          {"count", b.count},
                          {"slope", opt(b.slope)},
                          {"window_r2", opt(b.window_r2)}});
        }
        out.push_back({{"cell_id", m.cell_id},
                       {"x_metric", std::string(to_string(m.x_metric))},
                       {"y_metric", std::string(to_string(m.y_metric))},
                       {"bin_width", m.bin_width},
                       {"bins", bins}});
      }
      break;
    case ReportFamily::recommendations:
      for (const auto& r : snap.recommendations) {
        json rec = recommendation_record(r);
        rec["geo"] = nullptr;
        rec["prediction"] = nullptr;
        rec["priority"] = nullptr;
        for (const auto& g : snap.geo) {
          if (g.cell_id == r.cell_id) rec["geo"] = geo_record(g);
        }
        for (const auto& p : snap.predictions) {
          if (p.cell_id == r.cell_id) rec["prediction"] = prediction_record(p);
        }
        for (const auto& p : snap.priorities) {
          if (p.cell_id == r.cell_id) rec["priority"] = priority_record(p);
        }
        out.push_back(std::move(rec));
      }
      break;
    case ReportFamily::tuning:
      for (std::size_t i = 0; i < snap.tuning_batch.size(); ++i) {
        const auto& e = snap.tuning_batch[i];
        out.push_back({{"rank", i + 1},
                       {"cell_id", e.priority.cell_id},
                       {"priority", priority_record(e.priority)},
                       {"recommendation", e.recommendation ? recommendation_record(*e.recommendation) : json(nullptr)},
                       {"prediction", e.prediction ? prediction_record(*e.prediction) : json(nullptr)}});
      }
      break;
    case ReportFamily::audits:
      for (const auto& a : snap.audits) {
        json evidence = json::array();
        for (const auto& e : a.evidence) {
          evidence.push_back({{"cell_id", e.cell_id},
                              {"sector_id", e.sector_id},
                              {"value", e.value},
                              {"recorded_azimuth_deg", opt(e.recorded_azimuth_deg)},
                              {"corrected_azimuth_deg", opt(e.corrected_azimuth_deg)}});
        }
        out.push_back({{"kind", std::string(to_string(a.kind))},
                       {"site_id", a.site_id},
                       {"strength", std::string(to_string(a.strength))},
                       {"evidence", evidence}});
      }
      break;
    case ReportFamily::planning: {
      std::map<std::string, std::size_t> rank;
      for (std::size_t i = 0; i < snap.planning_rank.size(); ++i) rank[snap.planning_rank[i].cell_id] = i + 1;
      for (const auto& p : snap.planning) {
        const auto& s = p.suppression;
        json upgrades = json::array();
        for (const auto& u : p.upgrade_gains) {
          upgrades.push_back({{"horizon_weeks", u.horizon_weeks}, {"gain_bytes", u.gain_bytes}, {"gain_pct", u.gain_pct}});
        }
        json exhaustion = nullptr;
        if (p.weeks_to_exhaustion) {
          if (const int* w = std::get_if<int>(&*p.weeks_to_exhaustion)) exhaustion = *w;
          else exhaustion = "beyond_horizon";
        }
        json growth = nullptr;
        if (p.growth) {
          growth = {{"weekly_increase", p.growth->weekly_increase},
                    {"weeks_observed", p.growth->weeks_observed},
                    {"residual_rms", p.growth->residual_rms},
                    {"trusted", p.growth->trusted}};
        }
        json densification = nullptr;
        if (p.densification) {
          const auto& d = *p.densification;
          json curve = json::array();
          for (const auto& c : d.curve) {
            curve.push_back({{"load", c.load}, {"raw_kbps", c.raw_kbps}, {"fitted_kbps", c.fitted_kbps}, {"count", c.count}});
          }
          densification = {{"busy_load", d.busy_load},
                           {"speed_at_load", d.speed_at_load},
                           {"speed_at_half_load", d.speed_at_half_load},
                           {"gain_kbps", d.gain_kbps},
                           {"extrapolated", d.extrapolated},
                           {"curve", curve}};
        }
        auto r = rank.find(p.cell_id);
        out.push_back({{"cell_id", p.cell_id},
                       {"split_count", s.split_count},
                       {"f1", line_fit(s.low)},
                       {"f2", line_fit(s.high)},
                       {"slope_ratio", opt(s.slope_ratio)},
                       {"suppressed", s.suppressed ? json(*s.suppressed) : json(nullptr)},
                       {"slope_diff_t", opt(s.slope_diff_t)},
                       {"n_low", s.n_low},
                       {"n_high", s.n_high},
                       {"growth", growth},
                       {"upgrade", upgrades},
                       {"weeks_to_exhaustion", exhaustion},
                       {"densification", densification},
                       {"rank", r == rank.end() ? json(nullptr) : json(r->second)}});
      }
      break;
    }
    case ReportFamily::hourly:
      for (const auto& h : snap.hourly) {
        out.push_back({{"cell_id", h.cell_id},
                       {"hour_bucket", h.hour_bucket},
                       {"num_samples", h.num_samples},
                       {"total_bytes", h.total_bytes},
                       {"median_kbps", opt(h.median_kbps)},
                       {"median_rtt_ms", opt(h.median_rtt_ms)},
                       {"median_rsrp_dbm", opt(h.median_rsrp_dbm)},
                       {"median_rsrq_db", opt(h.median_rsrq_db)}});
      }
      break;
    case ReportFamily::errors:
      for (const auto& e : snap.errors) {
        out.push_back({{"cell_id", e.cell_id}, {"module", e.module}, {"code", e.code}, {"message", e.message}});
      }
      break;
  }
  return out;
}

}  // namespace

std::string_view to_string(ReportFamily family) {
  for (const auto& [f, name] : kFamilies) {
    if (f == family) return name;
  }
  return "unknown";
}

std::optional<ReportFamily> report_family_from_string(std::string_view name) {
  for (const auto& [f, n] : kFamilies) {
    if (n == name) return f;
  }
  return std::nullopt;
}

const std::vector<ReportFamily>& all_report_families() {
  static const std::vector<ReportFamily> families = [] {
    std::vector<ReportFamily> v;
    for (const auto& [f, name] : kFamilies) v.push_back(f);
    return v;
  }();
  return families;
}

void write_report_jsonl(std::ostream& out, const AnalysisSnapshot& snapshot, ReportFamily family) {
  for (const auto& r : records(snapshot, family)) out << r.dump() << '\n';
}

std::string snapshot_document(const AnalysisSnapshot& snapshot) {
  json sections = json::object();
  for (const auto& [family, name] : kFamilies) sections[std::string(name)] = records(snapshot, family);
  json doc{{"dataset_digest", snapshot.dataset_digest},
           {"window", {{"start", snapshot.window.start}, {"end", snapshot.window.end}}},
           {"cells", snapshot.cells},
           {"sections", std::move(sections)}};
  return doc.dump();
}

std::string snapshot_digest(const AnalysisSnapshot& snapshot) { return sha256_hex(snapshot_document(snapshot)); }

}  // namespace ranopt
