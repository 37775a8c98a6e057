// SPDX-License-Identifier: Apache-2.0

#include "ranopt/error.hpp"
#include "ranopt/types.hpp"

#include <array>
#include <utility>

namespace ranopt {

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::out_of_range: return "out_of_range";
    case RejectReason::missing_key_field: return "missing_key_field";
    case RejectReason::unparseable: return "unparseable";
  }
  return "unparseable";
}

namespace {
constexpr std::array<std::pair<Metric, std::string_view>, 7> kMetricNames{{
    {Metric::app_kbps, "app_kbps"},
    {Metric::rtt_ms, "rtt_ms"},
    {Metric::rsrp_dbm, "rsrp_dbm"},
    {Metric::rsrq_db, "rsrq_db"},
    {Metric::congestion_pct, "congestion_pct"},
    {Metric::num_samples, "num_samples"},
    {Metric::total_bytes, "total_bytes"},
}};
}  // namespace

std::string_view to_string(Metric metric) {
  for (const auto& [m, name] : kMetricNames) {
    if (m == metric) return name;
  }
  return "unknown";
}

std::optional<Metric> metric_from_string(std::string_view name) {
  for (const auto& [m, n] : kMetricNames) {
    if (n == name) return m;
  }
  return std::nullopt;
}

std::optional<double> sample_metric(const MeasurementSample& sample, Metric metric) {
  switch (metric) {
    case Metric::app_kbps: return sample.app_kbps;
    case Metric::rtt_ms: return sample.rtt_ms;
    case Metric::rsrp_dbm: return sample.rsrp_dbm;
    case Metric::rsrq_db: return sample.rsrq_db;
    case Metric::total_bytes: return sample.bytes;
    case Metric::congestion_pct:
    case Metric::num_samples: return std::nullopt;
  }
  return std::nullopt;
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::insufficient_data: return "insufficient_data";
    case ErrorCode::out_of_support: return "out_of_support";
    case ErrorCode::no_geo_data: return "no_geo_data";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::validation: return "validation";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::scenario_mismatch: return "scenario_mismatch";
  }
  return "error";
}

}  // namespace ranopt
