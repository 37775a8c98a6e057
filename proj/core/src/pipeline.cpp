// SPDX-License-Identifier: Apache-2.0

#include "ranopt/pipeline.hpp"

#include <algorithm>
#include <set>

#include "ranopt/digest.hpp"
#include "ranopt/error.hpp"

namespace ranopt {

const SensitivityModel* AnalysisSnapshot::model(std::string_view cell_id, Metric x, Metric y) const {
  for (const auto& m : sensitivity) {
    if (m.cell_id == cell_id && m.x_metric == x && m.y_metric == y) return &m;
  }
  return nullptr;
}

const CellProfile* AnalysisSnapshot::profile(std::string_view cell_id) const {
  for (const auto& p : profiles) {
    if (p.cell_id == cell_id) return &p;
  }
  return nullptr;
}

const CellPlanning* AnalysisSnapshot::planning_for(std::string_view cell_id) const {
  for (const auto& p : planning) {
    if (p.cell_id == cell_id) return &p;
  }
  return nullptr;
}

const AzimuthRecommendation* AnalysisSnapshot::recommendation(std::string_view cell_id) const {
  for (const auto& r : recommendations) {
    if (r.cell_id == cell_id) return &r;
  }
  return nullptr;
}

namespace {

struct ModelPair {
  Metric x;
  Metric y;
};

constexpr ModelPair kModelPairs[] = {
    {Metric::rsrp_dbm, Metric::app_kbps},
    {Metric::rsrq_db, Metric::app_kbps},
    {Metric::rsrp_dbm, Metric::rtt_ms},
    {Metric::rsrq_db, Metric::rtt_ms},
};

class ErrorLog {
 public:
  explicit ErrorLog(std::vector<CellModuleError>& out) : out_(out) {}

  void add(const std::string& cell, const std::string& module, const Error& e) {
    out_.push_back({cell, module, std::string(to_string(e.code())), e.what()});
  }
  void add(const std::string& cell, const std::string& module, ErrorCode code, const std::string& message) {
    out_.push_back({cell, module, std::string(to_string(code)), std::string(to_string(code)) + ": " + message});
  }

 private:
  std::vector<CellModuleError>& out_;
};

}  // namespace

AnalysisSnapshot run_pipeline(const Dataset& dataset, const EngineConfig& config, const CellScope& scope,
                              const std::map<std::string, EpochSeconds>& last_tuned) {
  AnalysisSnapshot snap;
  snap.dataset_digest = dataset_digest(dataset.samples, dataset.sites);
  ErrorLog errors(snap.errors);

  std::map<std::string, std::vector<MeasurementSample>> by_cell;
  for (const auto& s : dataset.samples) {
    if (scope.empty() || scope.contains(s.cell_id)) by_cell[s.cell_id].push_back(s);
  }
  for (const auto& cell : scope) {
    if (!by_cell.contains(cell)) errors.add(cell, "aggregation", ErrorCode::insufficient_data, "no samples");
  }
  if (by_cell.empty()) return snap;

  EpochSeconds first = by_cell.begin()->second.front().timestamp, last = first;
  std::vector<MeasurementSample> in_scope;
  for (const auto& [cell, samples] : by_cell) {
    snap.cells.push_back(cell);
    for (const auto& s : samples) {
      first = std::min(first, s.timestamp);
      last = std::max(last, s.timestamp);
      in_scope.push_back(s);
    }
  }
  snap.window = {hour_bucket_of(first) * kSecondsPerHour, last + 1};

  // Aggregation and profiles.
  snap.hourly = aggregate_hourly(in_scope);
  std::map<std::string, std::span<const CellHourlyAggregate>> hourly_of;
  for (std::size_t i = 0; i < snap.hourly.size();) {
    std::size_t j = i;
    while (j < snap.hourly.size() && snap.hourly[j].cell_id == snap.hourly[i].cell_id) ++j;
    hourly_of[snap.hourly[i].cell_id] = std::span<const CellHourlyAggregate>(snap.hourly).subspan(i, j - i);
    i = j;
  }
  for (const auto& cell : snap.cells) {
    auto labeling = label_busy_hours(hourly_of[cell], cell, config.busy_hours);
    if (labeling.insufficient_data) {
      errors.add(cell, "busy_hours", ErrorCode::insufficient_data,
                 std::to_string(labeling.days_observed) + " days observed");
    }
    snap.profiles.push_back(build_cell_profile(hourly_of[cell], by_cell[cell], labeling, snap.window, config.profile));
    snap.labelings.push_back(std::move(labeling));
  }

  // Sensitivity models.
  for (const auto& cell : snap.cells) {
    for (const auto& pair : kModelPairs) {
      const auto points = points_from_samples(by_cell[cell], pair.x, pair.y);
      const auto& params = pair.x == Metric::rsrq_db ? config.rsrq_sensitivity : config.rsrp_sensitivity;
      try {
        snap.sensitivity.push_back(fit_sensitivity(points, cell, pair.x, pair.y, params));
      } catch (const Error& e) {
        errors.add(cell, "sensitivity:" + std::string(to_string(pair.y)) + "~" + std::string(to_string(pair.x)), e);
      }
    }
  }

  // Detection and root cause.
  snap.anomalies = detect_anomalies(snap.profiles, config.anomaly_rules);
  for (const auto& anomaly : snap.anomalies) {
    CellModels models;
    for (const auto& m : snap.sensitivity) {
      if (m.cell_id == anomaly.cell_id && m.y_metric == anomaly.metric) models[m.x_metric] = &m;
    }
    try {
      snap.root_causes.push_back(root_cause(anomaly, snap.profiles, config.root_cause, models));
    } catch (const Error& e) {
      errors.add(anomaly.cell_id, "root_cause", e);
      snap.root_causes.push_back({anomaly.cell_id, anomaly.metric, {}, config.root_cause.n_pct});
    }
  }

  // RF tuning and audits, site by site.
  std::map<std::string, AzimuthRecommendation> rec_map;
  std::map<std::string, PostTuningPrediction> pred_map;
  std::set<std::string> configured;
  for (const auto& site : dataset.sites) {
    std::vector<CellGeoSummary> summaries;
    std::vector<AzimuthRecommendation> site_recs;
    for (const auto& cell : site.cells) {
      auto it = by_cell.find(cell.cell_id);
      if (it == by_cell.end()) continue;
      configured.insert(cell.cell_id);
      try {
        auto summary = cell_geo_summary(it->second, site, cell, config.geo);
        auto rec = recommend_azimuth(summary, site, cell);
        summaries.push_back(summary);
        snap.geo.push_back(summary);
        site_recs.push_back(rec);
        snap.recommendations.push_back(rec);
        rec_map[cell.cell_id] = rec;
        auto pred = predict_post_tuning(site, cell, it->second, rec.delta_deg,
                                        snap.model(cell.cell_id, Metric::rsrp_dbm, Metric::app_kbps),
                                        snap.model(cell.cell_id, Metric::rsrp_dbm, Metric::rtt_ms), config.antenna);
        snap.predictions.push_back(pred);
        pred_map[cell.cell_id] = pred;
      } catch (const Error& e) {
        errors.add(cell.cell_id, "rf_tuning", e);
      }
    }
    auto location = audit_site_location(site, summaries, config.site_distance_threshold_m);
    const bool location_suspect = location && location->strength == AuditStrength::strong;
    if (location) snap.audits.push_back(std::move(*location));
    // Azimuth deltas measured from a wrong site position are meaningless.
    if (!location_suspect) {
      for (auto& audit : detect_sector_swap(site_recs, config.swap)) snap.audits.push_back(std::move(audit));
    }
  }
  for (const auto& cell : snap.cells) {
    if (!configured.contains(cell)) {
      errors.add(cell, "rf_tuning", ErrorCode::not_found, "cell has no site configuration");
    }
  }

  // Prioritization and the tuning batch.
  std::map<std::string, SensitivityModel> priority_models;
  for (const auto& m : snap.sensitivity) {
    if (m.x_metric == config.optimization.weights.x_metric && m.y_metric == config.optimization.weights.y_metric) {
      priority_models.emplace(m.cell_id, m);
    }
  }
  snap.priorities = prioritize_cells(snap.profiles, priority_models, config.optimization.weights);
  snap.tuning_batch = iterate_optimization(snap.profiles, priority_models, rec_map, pred_map, last_tuned,
                                           snap.window.end, config.optimization);

  // Planning.
  std::vector<PlanningCandidate> candidates;
  for (std::size_t i = 0; i < snap.cells.size(); ++i) {
    const auto& cell = snap.cells[i];
    const auto hourly = hourly_of[cell];
    CellPlanning plan;
    plan.cell_id = cell;
    plan.suppression = fit_demand_regressions(hourly, config.demand);
    plan.suppression.cell_id = cell;
    try {
      plan.growth = estimate_growth(weekly_sample_counts(hourly), cell);
    } catch (const Error& e) {
      errors.add(cell, "planning:growth", e);
    }
    const auto week = current_week(hourly);
    if (!plan.suppression.low) {
      errors.add(cell, "planning:upgrade", ErrorCode::insufficient_data, "no low-regime fit");
    } else if (week.empty()) {
      errors.add(cell, "planning:upgrade", ErrorCode::insufficient_data, "no current week");
    } else if (plan.growth) {
      try {
        for (int n : config.horizons_weeks) {
          auto gain = predict_upgrade_gain(plan.suppression, week, *plan.growth, n);
          gain.hours.clear();
          plan.upgrade_gains.push_back(std::move(gain));
        }
        plan.weeks_to_exhaustion = weeks_to_capacity_exhaustion(
            plan.suppression, week, *plan.growth, config.exhaustion_threshold_pct, config.exhaustion_max_weeks);
      } catch (const Error& e) {
        errors.add(cell, "planning:upgrade", e);
      }
    }
    try {
      plan.densification = predict_densification_gain(hourly, snap.labelings[i], config.densification);
    } catch (const Error& e) {
      errors.add(cell, "planning:densification", e);
    }

    PlanningCandidate candidate{cell, std::nullopt, std::nullopt, snap.profiles[i].congestion_indicator_pct};
    if (!plan.upgrade_gains.empty()) candidate.gain_bytes = plan.upgrade_gains.front().gain_bytes;
    if (plan.densification) candidate.densification_gain_kbps = plan.densification->gain_kbps;
    candidates.push_back(candidate);
    snap.planning.push_back(std::move(plan));
  }
  snap.planning_rank = rank_planning_candidates(std::move(candidates), config.planning_budget);
  return snap;
}

}  // namespace ranopt
