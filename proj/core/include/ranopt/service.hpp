// SPDX-License-Identifier: Apache-2.0
//
// Optimization projects over a dataset: analysis snapshots, the action
// journal and post-action time series. State lives in a directory per
// project under the service root:
//
//   <root>/<project_id>/project.json
//   <root>/<project_id>/snapshots/<snapshot_id>.json   (written once)
//   <root>/<project_id>/journal.jsonl                   (append only)

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ranopt/types.hpp"

namespace ranopt {

struct ProjectSpec {
  std::string name;
  std::filesystem::path samples_path;
  std::filesystem::path sites_path;
  std::vector<std::string> scope;     // may be empty at creation; {"*"} selects every configured cell
  std::string overrides_json = "{}";  // EngineConfig keys
};

struct RejectSummary {
  std::size_t sample_lines = 0;
  std::size_t samples_accepted = 0;
  std::size_t site_lines = 0;
  std::size_t sites_accepted = 0;
  std::map<std::string, std::size_t> by_reason;  // across both files
};

struct ProjectInfo {
  std::string project_id;
  std::string name;
  std::string samples_path;
  std::string sites_path;
  std::vector<std::string> scope;
  std::string overrides_json;
  EpochSeconds created_at = 0;
  RejectSummary rejects;
  std::vector<std::string> snapshots;  // oldest first
};

inline constexpr const char* kActionAzimuthTuned = "azimuth_tuned";
inline constexpr const char* kActionOther = "other";

struct ActionRecord {
  std::uint64_t seq = 0;  // assigned by the journal, 1-based
  std::string project_id;
  std::string cell_id;
  std::string kind = kActionAzimuthTuned;
  std::optional<double> value;
  std::string note;
  EpochSeconds timestamp = 0;
  std::string idempotency_key;  // a repeated non-empty key returns the first record
};

struct AnalysisResult {
  std::string snapshot_id;
  std::string digest;
};

enum class Granularity { hourly, daily };

struct TimeSeriesQuery {
  std::string project_id;
  std::string cell_id;
  Metric metric = Metric::app_kbps;
  Granularity granularity = Granularity::daily;
  EpochSeconds from = INT64_MIN;  // inclusive
  EpochSeconds to = INT64_MAX;    // exclusive
  std::optional<std::string> snapshot_id;  // latest when absent
};

struct TimeSeriesPoint {
  EpochSeconds bucket_start = 0;
  double value = 0.0;
};

struct TimeSeriesResult {
  std::string cell_id;
  Metric metric = Metric::app_kbps;
  Granularity granularity = Granularity::daily;
  std::string snapshot_id;
  std::vector<TimeSeriesPoint> points;  // strictly increasing buckets
  std::vector<ActionRecord> markers;
};

/// Thread-safe. Reads run concurrently; journal appends and analyses are
/// serialized per project, and a second analysis of the same project waits
/// for the first.
class OptimizerService {
 public:
  explicit OptimizerService(std::filesystem::path root);
  ~OptimizerService();
  OptimizerService(const OptimizerService&) = delete;
  OptimizerService& operator=(const OptimizerService&) = delete;

  /// Throws Error(validation) with the reject summary when a dataset file is
  /// unreadable or yields no usable rows, and for invalid overrides.
  ProjectInfo create_project(const ProjectSpec& spec);
  ProjectInfo get_project(const std::string& project_id) const;
  std::vector<std::string> list_projects() const;

  /// Throws Error(validation) for an empty scope.
  AnalysisResult run_analysis(const std::string& project_id);

  /// Throws Error(not_found) for an unknown project or a cell outside the
  /// scope, and Error(validation) for an unknown kind or a timestamp earlier
  /// than the last journal entry.
  ActionRecord record_action(const std::string& project_id, ActionRecord action);
  std::vector<ActionRecord> journal(const std::string& project_id) const;

  /// Latest action time per cell, replayed from the journal.
  std::map<std::string, EpochSeconds> cooldown_state(const std::string& project_id) const;

  /// Congestion is only available at daily granularity. Throws
  /// Error(not_found) without a snapshot.
  TimeSeriesResult get_timeseries(const TimeSeriesQuery& query) const;

  /// Stored snapshot document (JSON text) and one of its sections.
  std::string snapshot_document(const std::string& project_id, const std::string& snapshot_id) const;
  std::string snapshot_section(const std::string& project_id, const std::string& snapshot_id,
                               const std::string& section) const;

  /// Sites, cells at their recorded azimuths, centroid summaries, the latest
  /// snapshot's recommendations and located samples of in-scope cells thinned
  /// to at most kMaxGeoPointsPerCell per cell (JSON text).
  struct GeoViewOptions {
    std::optional<std::string> cell_id;  // restrict to one cell
    bool include_points = true;
  };
  std::string geo_view(const std::string& project_id, const GeoViewOptions& options) const;
  std::string geo_view(const std::string& project_id) const { return geo_view(project_id, GeoViewOptions{}); }
  static constexpr std::size_t kMaxGeoPointsPerCell = 5000;

  const std::filesystem::path& root() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string_view to_string(Granularity granularity);
std::optional<Granularity> granularity_from_string(std::string_view name);

/// JSON text forms used by the HTTP layer and the CLI.
std::string to_json(const ProjectInfo& project);
std::string to_json(const ActionRecord& action);
std::string to_json(const TimeSeriesResult& series);
/// Parses {"name", "samples_path", "sites_path", "scope", "overrides"}; scope
/// may be an array of cell ids or the string "all".
ProjectSpec project_spec_from_json(std::string_view text);
/// Parses {"cell_id", "kind", "value", "note", "timestamp", "idempotency_key"}.
ActionRecord action_from_json(std::string_view text);

}  // namespace ranopt
