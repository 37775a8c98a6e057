// SPDX-License-Identifier: Apache-2.0
//
// Percentile/threshold anomaly rules over cell profiles and cross-metric
// root-cause attribution.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ranopt/aggregation.hpp"

namespace ranopt {

struct SensitivityModel;

enum class Direction { low_is_bad, high_is_bad };
enum class RuleMode { worst_fraction, absolute_threshold, relative_degradation };

/// Natural "bad" direction of a metric (low speed, high latency, ...).
Direction bad_direction(Metric metric);

struct AnomalyRule {
  Metric metric = Metric::app_kbps;
  Direction direction = Direction::low_is_bad;
  RuleMode mode = RuleMode::worst_fraction;
  double m_pct = 5.0;       // worst_fraction: 0 < m_pct <= 100
  double threshold = 0.0;   // absolute_threshold: metric units; relative_degradation: fraction

  /// Stable text form used in exports, e.g. "app_kbps:worst_fraction:5".
  std::string describe() const;
};

struct AnomalyReport {
  std::string cell_id;
  Metric metric = Metric::app_kbps;
  double observed = 0.0;
  AnomalyRule rule;
  double severity = 0.0;  // percentile rank within scope, 0 = worst
};

/// Cells considered by a rule; an empty scope means every profile.
using CellScope = std::set<std::string>;

/// worst_fraction flags ceil(M/100 * n) cells (n = in-scope cells with the
/// metric present) in worst-first order, ties broken by (value, cell_id).
/// absolute_threshold flags every cell strictly beyond the threshold.
/// Reports are ordered by rule, then worst-first.
std::vector<AnomalyReport> detect_anomalies(std::span<const CellProfile> profiles,
                                            std::span<const AnomalyRule> rules,
                                            const CellScope& scope = {});

/// Flags cells whose metric worsened by more than `rule.threshold` (relative)
/// between two profile sets keyed by cell_id.
std::vector<AnomalyReport> detect_degradations(std::span<const CellProfile> previous,
                                               std::span<const CellProfile> current,
                                               const AnomalyRule& rule, const CellScope& scope = {});

enum class CauseLabel { coverage, interference_or_quality, capacity_congestion, latency_path };

std::string_view to_string(CauseLabel label);
/// rsrp -> coverage, rsrq -> interference_or_quality, congestion -> capacity, rtt -> latency.
std::optional<CauseLabel> cause_for(Metric evidence_metric);

struct Cause {
  CauseLabel label = CauseLabel::coverage;
  Metric evidence = Metric::rsrp_dbm;
  double percentile = 0.0;  // position within scope, 0 = worst
  std::optional<double> slope;
};

struct RootCauseReport {
  std::string cell_id;
  Metric anomaly_metric = Metric::app_kbps;
  std::vector<Cause> causes;
  double n_pct = 0.0;
  bool unexplained() const { return causes.empty(); }
};

/// Sensitivity models for one cell keyed by x metric (y is the anomaly metric).
using CellModels = std::map<Metric, const SensitivityModel*>;

struct RootCauseParams {
  double n_pct = 20.0;
  std::vector<Metric> candidates{Metric::rsrp_dbm, Metric::rsrq_db, Metric::congestion_pct,
                                 Metric::rtt_ms};
};

/// A candidate metric is a cause when the anomalous cell sits in the scope's
/// worst N% for it. Throws Error(invalid_argument) when N < M of the rule.
RootCauseReport root_cause(const AnomalyReport& anomaly, std::span<const CellProfile> profiles,
                           const RootCauseParams& params, const CellModels& models = {},
                           const CellScope& scope = {});

/// Causes with a slope first, by descending |slope|; then by percentile
/// (worse first). Stable for full ties.
std::vector<Cause> rank_causes(std::vector<Cause> causes);

}  // namespace ranopt
