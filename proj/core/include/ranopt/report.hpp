// SPDX-License-Identifier: Apache-2.0
//
// Newline-delimited JSON exports of a snapshot and its canonical document.
// Object keys are sorted and numbers use the shortest round-trip form, so
// equal snapshots serialize to equal bytes.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ranopt/pipeline.hpp"

namespace ranopt {

enum class ReportFamily {
  cells,            // profiles and busy-hour labels
  anomalies,        // with root causes
  sensitivity,      // one record per model
  recommendations,  // azimuth, geo summary, post-tuning prediction, priority
  tuning,           // the tuning batch in rank order
  audits,
  planning,
  hourly,
  errors,
};

std::string_view to_string(ReportFamily family);
std::optional<ReportFamily> report_family_from_string(std::string_view name);
const std::vector<ReportFamily>& all_report_families();

/// One JSON object per line, in the snapshot's deterministic order.
void write_report_jsonl(std::ostream& out, const AnalysisSnapshot& snapshot, ReportFamily family);

/// {"dataset_digest", "window", "sections": {family: [records...]}} with sorted keys.
std::string snapshot_document(const AnalysisSnapshot& snapshot);

/// Hex SHA-256 of snapshot_document().
std::string snapshot_digest(const AnalysisSnapshot& snapshot);

}  // namespace ranopt
