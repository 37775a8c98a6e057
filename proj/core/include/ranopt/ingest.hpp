// SPDX-License-Identifier: Apache-2.0
//
// Parsing and validation of the two input streams: measurement samples and
// site configuration. Both are CSV with a header row; an empty field means
// the value is absent.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ranopt/types.hpp"

namespace ranopt {

inline constexpr const char* kSamplesHeader =
    "cell_id,site_id,sector_id,ts,lat,lon,app_kbps,rtt_ms,rsrp_dbm,rsrq_db,sinr_db,bytes";
inline constexpr const char* kSitesHeader =
    "site_id,lat,lon,antenna_height_m,cell_id,sector_id,azimuth_deg,tilt_deg,tx_power_dbm";

/// Maps canonical sample fields to the column names used by a data source.
/// The default profile is the canonical header itself.
struct ColumnProfile {
  std::string cell_id = "cell_id";
  std::string site_id = "site_id";
  std::string sector_id = "sector_id";
  std::string timestamp = "ts";
  std::string lat = "lat";
  std::string lon = "lon";
  std::string app_kbps = "app_kbps";
  std::string rtt_ms = "rtt_ms";
  std::string rsrp_dbm = "rsrp_dbm";
  std::string rsrq_db = "rsrq_db";
  std::string sinr_db = "sinr_db";
  std::string bytes = "bytes";
};

// Accepted measurement envelope.
struct SampleBounds {
  static constexpr double rsrp_min = -150.0, rsrp_max = -40.0;
  static constexpr double rsrq_min = -30.0, rsrq_max = 0.0;
  static constexpr double sinr_min = -20.0, sinr_max = 40.0;
  static constexpr double kbps_max = 10.0e6;   // (0, max]
  static constexpr double rtt_max = 60000.0;   // (0, max]
  static constexpr int sector_max = 5;
};

struct SampleParseResult {
  std::vector<MeasurementSample> samples;
  std::vector<RejectRecord> rejects;
  std::size_t data_lines = 0;
};

struct SiteParseResult {
  std::vector<SiteConfig> sites;
  std::vector<RejectRecord> rejects;
  std::size_t data_lines = 0;
};

/// Every data line lands in exactly one of `samples` or `rejects`, in input
/// order. Throws Error(io_error) for an unreadable stream and
/// Error(validation) for a header that lacks a key column.
SampleParseResult parse_samples(std::istream& in, const ColumnProfile& profile = {});
SampleParseResult parse_samples_file(const std::filesystem::path& path,
                                     const ColumnProfile& profile = {});

/// One row per cell; rows of the same site must agree on the site fields.
/// A cell_id seen before, or a repeated sector_id within a site, rejects the
/// later row.
SiteParseResult parse_site_config(std::istream& in);
SiteParseResult parse_site_config_file(const std::filesystem::path& path);

/// Canonical CSV; doubles use the shortest representation that round-trips.
void write_samples_csv(std::ostream& out, const std::vector<MeasurementSample>& samples);
void write_sites_csv(std::ostream& out, const std::vector<SiteConfig>& sites);

struct CellGroup {
  CellConfig cell;
  SiteConfig site;
  std::vector<MeasurementSample> samples;
};

struct JoinedDataset {
  std::map<std::string, CellGroup> groups;  // configured cells that have samples
  std::map<std::string, std::vector<MeasurementSample>> unconfigured;
};

JoinedDataset join_samples_to_sites(const std::vector<MeasurementSample>& samples,
                                    const std::vector<SiteConfig>& sites);

}  // namespace ranopt
