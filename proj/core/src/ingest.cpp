// SPDX-License-Identifier: Apache-2.0

#include "ranopt/ingest.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <variant>

#include "ranopt/error.hpp"
#include "text.hpp"

namespace ranopt {

namespace {

struct LineReject {
  RejectReason reason;
  std::string detail;
};

class HeaderIndex {
 public:
  explicit HeaderIndex(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      index_.emplace(std::string(text::trim(header[i])), i);
    }
    width_ = header.size();
  }

  std::optional<std::size_t> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t width() const { return width_; }

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t width_ = 0;
};

std::string_view field_at(const std::vector<std::string>& fields, std::optional<std::size_t> idx) {
  if (!idx) return {};
  return text::trim(fields[*idx]);
}

// Reads an optional numeric field: empty -> absent, junk -> reject.
std::optional<LineReject> read_optional(const std::vector<std::string>& fields,
                                        std::optional<std::size_t> idx, const char* name,
                                        std::optional<double>& out) {
  const auto raw = field_at(fields, idx);
  if (raw.empty()) {
    out.reset();
    return std::nullopt;
  }
  auto v = text::parse_double(raw);
  if (!v || !std::isfinite(*v)) {
    return LineReject{RejectReason::unparseable, std::string(name) + " is not a number"};
  }
  out = *v;
  return std::nullopt;
}

bool getline_stripped(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

void require_readable(std::istream& in) {
  if (!in.good()) throw Error(ErrorCode::io_error, "input stream is not readable");
}

std::optional<LineReject> check_range(const std::optional<double>& v, double lo, double hi,
                                      bool lo_open, const char* name) {
  if (!v) return std::nullopt;
  const bool below = lo_open ? !(*v > lo) : !(*v >= lo);
  if (below || !(*v <= hi)) {
    return LineReject{RejectReason::out_of_range, std::string(name) + " out of range"};
  }
  return std::nullopt;
}

struct SampleColumns {
  std::optional<std::size_t> cell_id, site_id, sector_id, ts, lat, lon, kbps, rtt, rsrp, rsrq,
      sinr, bytes;
};

std::variant<MeasurementSample, LineReject> parse_sample_line(const std::string& line,
                                                              const HeaderIndex& header,
                                                              const SampleColumns& col) {
  auto split = text::split_csv(line);
  if (!split) return LineReject{RejectReason::unparseable, "unterminated quote"};
  const auto& f = *split;
  if (f.size() != header.width()) {
    return LineReject{RejectReason::unparseable, "field count does not match header"};
  }

  MeasurementSample s;
  s.cell_id = std::string(field_at(f, col.cell_id));
  s.site_id = std::string(field_at(f, col.site_id));
  const auto sector_raw = field_at(f, col.sector_id);
  const auto ts_raw = field_at(f, col.ts);
  if (s.cell_id.empty()) return LineReject{RejectReason::missing_key_field, "cell_id missing"};
  if (s.site_id.empty()) return LineReject{RejectReason::missing_key_field, "site_id missing"};
  if (sector_raw.empty()) return LineReject{RejectReason::missing_key_field, "sector_id missing"};
  if (ts_raw.empty()) return LineReject{RejectReason::missing_key_field, "ts missing"};

  const auto sector = text::parse_int(sector_raw);
  if (!sector) return LineReject{RejectReason::unparseable, "sector_id is not an integer"};
  const auto ts = text::parse_int(ts_raw);
  if (!ts) return LineReject{RejectReason::unparseable, "ts is not an integer"};
  s.timestamp = *ts;

  std::optional<double> lat, lon;
  const std::pair<std::optional<std::size_t>, std::pair<const char*, std::optional<double>*>> numeric[] = {
      {col.lat, {"lat", &lat}},           {col.lon, {"lon", &lon}},
      {col.kbps, {"app_kbps", &s.app_kbps}}, {col.rtt, {"rtt_ms", &s.rtt_ms}},
      {col.rsrp, {"rsrp_dbm", &s.rsrp_dbm}}, {col.rsrq, {"rsrq_db", &s.rsrq_db}},
      {col.sinr, {"sinr_db", &s.sinr_db}},   {col.bytes, {"bytes", &s.bytes}},
  };
  for (const auto& [idx, target] : numeric) {
    if (auto r = read_optional(f, idx, target.first, *target.second)) return *r;
  }

  if (*sector < 0 || *sector > SampleBounds::sector_max) {
    return LineReject{RejectReason::out_of_range, "sector_id out of range"};
  }
  s.sector_id = static_cast<int>(*sector);
  if (lat.has_value() != lon.has_value()) {
    return LineReject{RejectReason::unparseable, "location needs both lat and lon"};
  }
  if (auto r = check_range(lat, -90, 90, false, "lat")) return *r;
  if (auto r = check_range(lon, -180, 180, false, "lon")) return *r;
  if (lat) s.location = GeoPoint{*lat, *lon};

  using B = SampleBounds;
  if (auto r = check_range(s.app_kbps, 0, B::kbps_max, true, "app_kbps")) return *r;
  if (auto r = check_range(s.rtt_ms, 0, B::rtt_max, true, "rtt_ms")) return *r;
  if (auto r = check_range(s.rsrp_dbm, B::rsrp_min, B::rsrp_max, false, "rsrp_dbm")) return *r;
  if (auto r = check_range(s.rsrq_db, B::rsrq_min, B::rsrq_max, false, "rsrq_db")) return *r;
  if (auto r = check_range(s.sinr_db, B::sinr_min, B::sinr_max, false, "sinr_db")) return *r;
  if (s.bytes && *s.bytes < 0) return LineReject{RejectReason::out_of_range, "bytes negative"};

  if (!s.app_kbps && !s.rtt_ms && !s.rsrp_dbm && !s.rsrq_db) {
    return LineReject{RejectReason::missing_key_field, "no metric present"};
  }
  return s;
}

void append_optional(std::string& row, const std::optional<double>& v) {
  row.push_back(',');
  if (v) row += text::format_shortest(*v);
}

}  // namespace

SampleParseResult parse_samples(std::istream& in, const ColumnProfile& profile) {
  require_readable(in);
  SampleParseResult result;
  std::string line;
  if (!getline_stripped(in, line)) throw Error(ErrorCode::validation, "samples input has no header");
  auto header_fields = text::split_csv(line);
  if (!header_fields) throw Error(ErrorCode::validation, "samples header is malformed");
  const HeaderIndex header(*header_fields);

  SampleColumns col;
  col.cell_id = header.find(profile.cell_id);
  col.site_id = header.find(profile.site_id);
  col.sector_id = header.find(profile.sector_id);
  col.ts = header.find(profile.timestamp);
  col.lat = header.find(profile.lat);
  col.lon = header.find(profile.lon);
  col.kbps = header.find(profile.app_kbps);
  col.rtt = header.find(profile.rtt_ms);
  col.rsrp = header.find(profile.rsrp_dbm);
  col.rsrq = header.find(profile.rsrq_db);
  col.sinr = header.find(profile.sinr_db);
  col.bytes = header.find(profile.bytes);
  if (!col.cell_id || !col.site_id || !col.sector_id || !col.ts) {
    throw Error(ErrorCode::validation, "samples header lacks one of cell_id, site_id, sector_id, ts");
  }

  std::size_t line_number = 1;
  while (getline_stripped(in, line)) {
    ++line_number;
    ++result.data_lines;
    auto parsed = parse_sample_line(line, header, col);
    if (auto* s = std::get_if<MeasurementSample>(&parsed)) {
      result.samples.push_back(std::move(*s));
    } else {
      auto& r = std::get<LineReject>(parsed);
      result.rejects.push_back({line_number, r.reason, std::move(r.detail), line});
    }
  }
  if (in.bad()) throw Error(ErrorCode::io_error, "read failure while parsing samples");
  return result;
}

SampleParseResult parse_samples_file(const std::filesystem::path& path, const ColumnProfile& profile) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  return parse_samples(in, profile);
}

SiteParseResult parse_site_config(std::istream& in) {
  require_readable(in);
  SiteParseResult result;
  std::string line;
  if (!getline_stripped(in, line)) throw Error(ErrorCode::validation, "sites input has no header");
  auto header_fields = text::split_csv(line);
  if (!header_fields) throw Error(ErrorCode::validation, "sites header is malformed");
  const HeaderIndex header(*header_fields);

  const auto c_site = header.find("site_id"), c_lat = header.find("lat"), c_lon = header.find("lon"),
             c_height = header.find("antenna_height_m"), c_cell = header.find("cell_id"),
             c_sector = header.find("sector_id"), c_az = header.find("azimuth_deg"),
             c_tilt = header.find("tilt_deg"), c_tx = header.find("tx_power_dbm");
  if (!c_site || !c_lat || !c_lon || !c_height || !c_cell || !c_sector || !c_az) {
    throw Error(ErrorCode::validation, "sites header lacks a required column");
  }

  std::unordered_map<std::string, std::size_t> site_index;
  std::unordered_set<std::string> seen_cells;
  std::vector<std::set<int>> site_sectors;

  std::size_t line_number = 1;
  while (getline_stripped(in, line)) {
    ++line_number;
    ++result.data_lines;
    auto reject = [&](RejectReason reason, std::string detail) {
      result.rejects.push_back({line_number, reason, std::move(detail), line});
    };

    auto split = text::split_csv(line);
    if (!split) { reject(RejectReason::unparseable, "unterminated quote"); continue; }
    const auto& f = *split;
    if (f.size() != header.width()) {
      reject(RejectReason::unparseable, "field count does not match header");
      continue;
    }
    const std::string site_id(field_at(f, c_site));
    CellConfig cell;
    cell.cell_id = std::string(field_at(f, c_cell));
    if (site_id.empty()) { reject(RejectReason::missing_key_field, "site_id missing"); continue; }
    if (cell.cell_id.empty()) { reject(RejectReason::missing_key_field, "cell_id missing"); continue; }

    const auto lat = text::parse_double(field_at(f, c_lat));
    const auto lon = text::parse_double(field_at(f, c_lon));
    const auto height = text::parse_double(field_at(f, c_height));
    const auto sector = text::parse_int(field_at(f, c_sector));
    const auto az = text::parse_double(field_at(f, c_az));
    if (field_at(f, c_lat).empty() || field_at(f, c_lon).empty() || field_at(f, c_height).empty() ||
        field_at(f, c_sector).empty() || field_at(f, c_az).empty()) {
      reject(RejectReason::missing_key_field, "required site or cell field missing");
      continue;
    }
    if (!lat || !lon || !height || !sector || !az) {
      reject(RejectReason::unparseable, "non-numeric site or cell field");
      continue;
    }
    std::optional<LineReject> bad;
    if (!bad) bad = read_optional(f, c_tilt, "tilt_deg", cell.tilt_deg);
    if (!bad) bad = read_optional(f, c_tx, "tx_power_dbm", cell.tx_power_dbm);
    if (bad) { reject(bad->reason, bad->detail); continue; }

    if (*lat < -90 || *lat > 90 || *lon < -180 || *lon > 180) {
      reject(RejectReason::out_of_range, "site location out of range");
      continue;
    }
    if (!(*height > 0)) { reject(RejectReason::out_of_range, "antenna_height_m must be positive"); continue; }
    if (*sector < 0 || *sector > SampleBounds::sector_max) {
      reject(RejectReason::out_of_range, "sector_id out of range");
      continue;
    }
    if (!(*az >= 0.0 && *az < 360.0)) { reject(RejectReason::out_of_range, "azimuth_deg not in [0, 360)"); continue; }
    cell.sector_id = static_cast<int>(*sector);
    cell.azimuth_deg = *az;

    if (seen_cells.contains(cell.cell_id)) {
      reject(RejectReason::unparseable, "duplicate cell_id " + cell.cell_id);
      continue;
    }
    auto it = site_index.find(site_id);
    if (it != site_index.end()) {
      const SiteConfig& site = result.sites[it->second];
      if (site.location.lat != *lat || site.location.lon != *lon || site.antenna_height_m != *height) {
        reject(RejectReason::unparseable, "site fields disagree with earlier rows of " + site_id);
        continue;
      }
      if (site_sectors[it->second].contains(cell.sector_id)) {
        reject(RejectReason::unparseable, "duplicate sector_id within site " + site_id);
        continue;
      }
    } else {
      it = site_index.emplace(site_id, result.sites.size()).first;
      result.sites.push_back(SiteConfig{site_id, GeoPoint{*lat, *lon}, *height, {}});
      site_sectors.emplace_back();
    }
    seen_cells.insert(cell.cell_id);
    site_sectors[it->second].insert(cell.sector_id);
    result.sites[it->second].cells.push_back(std::move(cell));
  }
  if (in.bad()) throw Error(ErrorCode::io_error, "read failure while parsing sites");
  return result;
}

SiteParseResult parse_site_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  return parse_site_config(in);
}

void write_samples_csv(std::ostream& out, const std::vector<MeasurementSample>& samples) {
  out << kSamplesHeader << '\n';
  std::string row;
  for (const auto& s : samples) {
    row.clear();
    row += text::csv_field(s.cell_id);
    row += ',';
    row += text::csv_field(s.site_id);
    row += ',';
    row += std::to_string(s.sector_id);
    row += ',';
    row += std::to_string(s.timestamp);
    append_optional(row, s.location ? std::optional<double>(s.location->lat) : std::nullopt);
    append_optional(row, s.location ? std::optional<double>(s.location->lon) : std::nullopt);
    append_optional(row, s.app_kbps);
    append_optional(row, s.rtt_ms);
    append_optional(row, s.rsrp_dbm);
    append_optional(row, s.rsrq_db);
    append_optional(row, s.sinr_db);
    append_optional(row, s.bytes);
    out << row << '\n';
  }
}

void write_sites_csv(std::ostream& out, const std::vector<SiteConfig>& sites) {
  out << kSitesHeader << '\n';
  for (const auto& site : sites) {
    for (const auto& cell : site.cells) {
      std::string row = text::csv_field(site.site_id);
      row += ',' + text::format_shortest(site.location.lat);
      row += ',' + text::format_shortest(site.location.lon);
      row += ',' + text::format_shortest(site.antenna_height_m);
      row += ',' + text::csv_field(cell.cell_id);
      row += ',' + std::to_string(cell.sector_id);
      row += ',' + text::format_shortest(cell.azimuth_deg);
      append_optional(row, cell.tilt_deg);
      append_optional(row, cell.tx_power_dbm);
      out << row << '\n';
    }
  }
}

JoinedDataset join_samples_to_sites(const std::vector<MeasurementSample>& samples,
                                    const std::vector<SiteConfig>& sites) {
  std::unordered_map<std::string, std::pair<const SiteConfig*, const CellConfig*>> by_cell;
  for (const auto& site : sites) {
    for (const auto& cell : site.cells) by_cell.emplace(cell.cell_id, std::make_pair(&site, &cell));
  }
  JoinedDataset joined;
  for (const auto& s : samples) {
    auto it = by_cell.find(s.cell_id);
    if (it == by_cell.end()) {
      joined.unconfigured[s.cell_id].push_back(s);
      continue;
    }
    auto [group, inserted] = joined.groups.try_emplace(s.cell_id);
    if (inserted) {
      group->second.cell = *it->second.second;
      group->second.site = *it->second.first;
    }
    group->second.samples.push_back(s);
  }
  return joined;
}

}  // namespace ranopt
