// SPDX-License-Identifier: Apache-2.0
//
// End-to-end analysis over one dataset: aggregation, detection, sensitivity,
// RF tuning and planning. Per-cell module failures are recorded in the
// snapshot and never abort the run.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ranopt/aggregation.hpp"
#include "ranopt/detection.hpp"
#include "ranopt/planning.hpp"
#include "ranopt/rf_tuning.hpp"
#include "ranopt/sensitivity.hpp"
#include "ranopt/types.hpp"

namespace ranopt {

struct EngineConfig {
  BusyHourParams busy_hours;
  ProfileParams profile;
  std::vector<AnomalyRule> anomaly_rules{AnomalyRule{}};
  RootCauseParams root_cause;
  SensitivityParams rsrp_sensitivity = default_sensitivity_params(Metric::rsrp_dbm);
  SensitivityParams rsrq_sensitivity = default_sensitivity_params(Metric::rsrq_db);
  GeoSummaryParams geo;
  double site_distance_threshold_m = 10000.0;
  SwapParams swap;
  AntennaPattern antenna;
  OptimizationParams optimization;
  DemandParams demand;
  DensificationParams densification;
  std::vector<int> horizons_weeks{4, 8};
  double exhaustion_threshold_pct = 5.0;
  int exhaustion_max_weeks = 52;
  std::optional<std::size_t> planning_budget;
};

struct Dataset {
  std::vector<MeasurementSample> samples;
  std::vector<SiteConfig> sites;
};

struct CellPlanning {
  std::string cell_id;
  SuppressionModel suppression;
  std::optional<GrowthEstimate> growth;
  std::vector<UpgradeGainPrediction> upgrade_gains;  // one per horizon, hour detail dropped
  std::optional<WeeksToExhaustion> weeks_to_exhaustion;
  std::optional<DensificationGainPrediction> densification;
};

struct CellModuleError {
  std::string cell_id;
  std::string module;
  std::string code;
  std::string message;
};

struct AnalysisSnapshot {
  std::string dataset_digest;
  TimeWindow window;
  std::vector<std::string> cells;  // analysed cells, sorted
  std::vector<CellHourlyAggregate> hourly;
  std::vector<BusyHourLabeling> labelings;
  std::vector<CellProfile> profiles;
  std::vector<AnomalyReport> anomalies;
  std::vector<RootCauseReport> root_causes;  // parallel to anomalies
  std::vector<SensitivityModel> sensitivity;
  std::vector<CellGeoSummary> geo;
  std::vector<AzimuthRecommendation> recommendations;
  std::vector<PostTuningPrediction> predictions;
  std::vector<ConfigAudit> audits;
  std::vector<CellPriority> priorities;
  std::vector<TuningBatchEntry> tuning_batch;
  std::vector<CellPlanning> planning;
  std::vector<PlanningCandidate> planning_rank;
  std::vector<CellModuleError> errors;

  const SensitivityModel* model(std::string_view cell_id, Metric x, Metric y) const;
  const CellProfile* profile(std::string_view cell_id) const;
  const CellPlanning* planning_for(std::string_view cell_id) const;
  const AzimuthRecommendation* recommendation(std::string_view cell_id) const;
};

/// Runs every module over the cells in `scope` (all cells with samples when
/// empty). `last_tuned` feeds the tuning cooldown; the cooldown clock is the
/// end of the data window.
AnalysisSnapshot run_pipeline(const Dataset& dataset, const EngineConfig& config = {},
                              const CellScope& scope = {},
                              const std::map<std::string, EpochSeconds>& last_tuned = {});

}  // namespace ranopt
