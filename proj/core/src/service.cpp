// SPDX-License-Identifier: Apache-2.0

#include "ranopt/service.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <sstream>

#include "json_io.hpp"
#include "ranopt/aggregation.hpp"
#include "ranopt/config.hpp"
#include "ranopt/digest.hpp"
#include "ranopt/error.hpp"
#include "ranopt/ingest.hpp"
#include "ranopt/pipeline.hpp"
#include "ranopt/report.hpp"
#include "ranopt/rf_tuning.hpp"
#include "ranopt/stats.hpp"

namespace fs = std::filesystem;

namespace ranopt {

namespace {

constexpr EpochSeconds kSecondsPerDay = 86400;

std::string padded_id(char prefix, std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%06llu", prefix, static_cast<unsigned long long>(n));
  return buf;
}

bool valid_id(const std::string& id, char prefix) {
  if (id.size() < 2 || id[0] != prefix) return false;
  return std::all_of(id.begin() + 1, id.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::io_error, "cannot read " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Write-then-rename so readers never observe a partial file.
void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::io_error, "cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw Error(ErrorCode::io_error, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

EpochSeconds now_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

EpochSeconds floor_div(EpochSeconds t, EpochSeconds d) {
  EpochSeconds q = t / d;
  if (t % d < 0) --q;
  return q;
}

json rejects_json(const RejectSummary& r) {
  return {{"sample_lines", r.sample_lines},
          {"samples_accepted", r.samples_accepted},
          {"site_lines", r.site_lines},
          {"sites_accepted", r.sites_accepted},
          {"by_reason", r.by_reason}};
}

RejectSummary rejects_from_json(const json& j) {
  RejectSummary r;
  r.sample_lines = j.at("sample_lines").get<std::size_t>();
  r.samples_accepted = j.at("samples_accepted").get<std::size_t>();
  r.site_lines = j.at("site_lines").get<std::size_t>();
  r.sites_accepted = j.at("sites_accepted").get<std::size_t>();
  r.by_reason = j.at("by_reason").get<std::map<std::string, std::size_t>>();
  return r;
}

std::string describe(const RejectSummary& r) {
  std::string s = "samples " + std::to_string(r.samples_accepted) + "/" + std::to_string(r.sample_lines) +
                  " accepted, sites " + std::to_string(r.sites_accepted) + "/" + std::to_string(r.site_lines) +
                  " accepted";
  for (const auto& [reason, n] : r.by_reason) s += ", " + reason + "=" + std::to_string(n);
  return s;
}

json project_json(const ProjectInfo& p) {
  return {{"project_id", p.project_id},
          {"name", p.name},
          {"samples_path", p.samples_path},
          {"sites_path", p.sites_path},
          {"scope", p.scope},
          {"overrides", json::parse(p.overrides_json)},
          {"created_at", p.created_at},
          {"rejects", rejects_json(p.rejects)}};
}

ProjectInfo project_from_json(const json& j) {
  ProjectInfo p;
  p.project_id = j.at("project_id").get<std::string>();
  p.name = j.at("name").get<std::string>();
  p.samples_path = j.at("samples_path").get<std::string>();
  p.sites_path = j.at("sites_path").get<std::string>();
  p.scope = j.at("scope").get<std::vector<std::string>>();
  p.overrides_json = j.at("overrides").dump();
  p.created_at = j.at("created_at").get<EpochSeconds>();
  p.rejects = rejects_from_json(j.at("rejects"));
  return p;
}

json action_json(const ActionRecord& a) {
  return {{"seq", a.seq},
          {"project_id", a.project_id},
          {"cell_id", a.cell_id},
          {"kind", a.kind},
          {"value", opt(a.value)},
          {"note", a.note},
          {"timestamp", a.timestamp},
          {"idempotency_key", a.idempotency_key}};
}

ActionRecord action_record_from_json(const json& j) {
  ActionRecord a;
  a.seq = j.at("seq").get<std::uint64_t>();
  a.project_id = j.at("project_id").get<std::string>();
  a.cell_id = j.at("cell_id").get<std::string>();
  a.kind = j.at("kind").get<std::string>();
  if (!j.at("value").is_null()) a.value = j.at("value").get<double>();
  a.note = j.at("note").get<std::string>();
  a.timestamp = j.at("timestamp").get<EpochSeconds>();
  a.idempotency_key = j.value("idempotency_key", std::string());
  return a;
}

std::optional<double> hourly_value(const json& rec, Metric metric) {
  const char* key = nullptr;
  switch (metric) {
    case Metric::app_kbps: key = "median_kbps"; break;
    case Metric::rtt_ms: key = "median_rtt_ms"; break;
    case Metric::rsrp_dbm: key = "median_rsrp_dbm"; break;
    case Metric::rsrq_db: key = "median_rsrq_db"; break;
    case Metric::num_samples: key = "num_samples"; break;
    case Metric::total_bytes: key = "total_bytes"; break;
    case Metric::congestion_pct: return std::nullopt;
  }
  const auto& v = rec.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

struct LoadedDataset {
  Dataset data;
  RejectSummary rejects;
};

LoadedDataset load_dataset(const fs::path& samples_path, const fs::path& sites_path) {
  LoadedDataset out;
  SampleParseResult samples;
  SiteParseResult sites;
  try {
    samples = parse_samples_file(samples_path);
    sites = parse_site_config_file(sites_path);
  } catch (const Error& e) {
    throw Error(ErrorCode::validation, std::string("dataset unreadable: ") + e.what());
  }
  auto& r = out.rejects;
  r.sample_lines = samples.data_lines;
  r.samples_accepted = samples.samples.size();
  r.site_lines = sites.data_lines;
  r.sites_accepted = 0;
  for (const auto& s : sites.sites) r.sites_accepted += s.cells.size();
  for (const auto& x : samples.rejects) ++r.by_reason[std::string(to_string(x.reason))];
  for (const auto& x : sites.rejects) ++r.by_reason[std::string(to_string(x.reason))];
  if (samples.samples.empty() || sites.sites.empty()) {
    throw Error(ErrorCode::validation, "dataset has no usable rows: " + describe(r));
  }
  out.data.samples = std::move(samples.samples);
  out.data.sites = std::move(sites.sites);
  return out;
}

}  // namespace

struct OptimizerService::Impl {
  struct Project {
    ProjectInfo info;  // snapshots list is not kept here
    fs::path dir;
    EngineConfig config;

    mutable std::shared_mutex journal_mu;
    std::vector<ActionRecord> journal;

    std::mutex analysis_mu;

    mutable std::mutex data_mu;
    std::shared_ptr<const Dataset> data;
  };

  fs::path root;
  mutable std::mutex projects_mu;
  mutable std::map<std::string, std::shared_ptr<Project>> projects;
  std::uint64_t next_project = 1;

  explicit Impl(fs::path r) : root(std::move(r)) {
    fs::create_directories(root);
    for (const auto& entry : fs::directory_iterator(root)) {
      const auto name = entry.path().filename().string();
      if (entry.is_directory() && valid_id(name, 'p')) {
        next_project = std::max<std::uint64_t>(next_project, std::stoull(name.substr(1)) + 1);
      }
    }
  }

  std::shared_ptr<Project> open(const ProjectInfo& info) const {
    auto p = std::make_shared<Project>();
    p->info = info;
    p->dir = root / info.project_id;
    p->config = apply_config_json(info.overrides_json, EngineConfig{});
    std::ifstream f(p->dir / "journal.jsonl");
    std::string line;
    while (std::getline(f, line)) {
      if (!line.empty()) p->journal.push_back(action_record_from_json(json::parse(line)));
    }
    return p;
  }

  std::shared_ptr<Project> project(const std::string& id) const {
    std::lock_guard lock(projects_mu);
    if (auto it = projects.find(id); it != projects.end()) return it->second;
    const auto file = root / id / "project.json";
    if (!valid_id(id, 'p') || !fs::exists(file)) throw Error(ErrorCode::not_found, "unknown project " + id);
    auto p = open(project_from_json(json::parse(read_file(file))));
    projects.emplace(id, p);
    return p;
  }

  std::vector<std::string> snapshot_ids(const Project& p) const {
    std::vector<std::string> ids;
    const auto dir = p.dir / "snapshots";
    if (!fs::exists(dir)) return ids;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() != ".json") continue;
      auto stem = entry.path().stem().string();
      if (valid_id(stem, 's')) ids.push_back(std::move(stem));
    }
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  std::shared_ptr<const Dataset> dataset(Project& p, bool reload) const {
    std::lock_guard lock(p.data_mu);
    if (!p.data || reload) {
      p.data = std::make_shared<const Dataset>(load_dataset(p.info.samples_path, p.info.sites_path).data);
    }
    return p.data;
  }

  json snapshot(const Project& p, const std::string& sid) const {
    const auto file = p.dir / "snapshots" / (sid + ".json");
    if (!valid_id(sid, 's') || !fs::exists(file)) {
      throw Error(ErrorCode::not_found, "unknown snapshot " + sid + " in project " + p.info.project_id);
    }
    return json::parse(read_file(file));
  }

  bool in_scope(const Project& p, const std::string& cell) const {
    return std::find(p.info.scope.begin(), p.info.scope.end(), cell) != p.info.scope.end();
  }
};

OptimizerService::OptimizerService(fs::path root) : impl_(std::make_unique<Impl>(std::move(root))) {}
OptimizerService::~OptimizerService() = default;

const fs::path& OptimizerService::root() const { return impl_->root; }

ProjectInfo OptimizerService::create_project(const ProjectSpec& spec) {
  auto loaded = load_dataset(spec.samples_path, spec.sites_path);
  apply_config_json(spec.overrides_json, EngineConfig{});

  ProjectInfo info;
  info.name = spec.name;
  info.samples_path = fs::absolute(spec.samples_path).lexically_normal().string();
  info.sites_path = fs::absolute(spec.sites_path).lexically_normal().string();
  info.overrides_json = json::parse(spec.overrides_json).dump();
  info.rejects = loaded.rejects;
  info.created_at = now_seconds();
  if (spec.scope.size() == 1 && spec.scope[0] == "*") {
    for (const auto& site : loaded.data.sites) {
      for (const auto& cell : site.cells) info.scope.push_back(cell.cell_id);
    }
  } else {
    std::set<std::string> seen;
    for (const auto& c : spec.scope) {
      if (seen.insert(c).second) info.scope.push_back(c);
    }
  }

  std::lock_guard lock(impl_->projects_mu);
  info.project_id = padded_id('p', impl_->next_project++);
  const auto dir = impl_->root / info.project_id;
  fs::create_directories(dir / "snapshots");
  write_file_atomic(dir / "project.json", project_json(info).dump(2) + "\n");
  std::ofstream(dir / "journal.jsonl", std::ios::app);
  auto p = impl_->open(info);
  p->data = std::make_shared<const Dataset>(std::move(loaded.data));
  impl_->projects.emplace(info.project_id, p);
  return info;
}

ProjectInfo OptimizerService::get_project(const std::string& project_id) const {
  auto p = impl_->project(project_id);
  ProjectInfo info = project_from_json(json::parse(read_file(p->dir / "project.json")));
  info.snapshots = impl_->snapshot_ids(*p);
  return info;
}

std::vector<std::string> OptimizerService::list_projects() const {
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(impl_->root)) {
    const auto name = entry.path().filename().string();
    if (valid_id(name, 'p') && fs::exists(entry.path() / "project.json")) ids.push_back(name);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

AnalysisResult OptimizerService::run_analysis(const std::string& project_id) {
  auto p = impl_->project(project_id);
  if (p->info.scope.empty()) throw Error(ErrorCode::validation, "project " + project_id + " has an empty cell scope");

  std::lock_guard analysis(p->analysis_mu);
  const auto data = impl_->dataset(*p, true);
  const CellScope scope(p->info.scope.begin(), p->info.scope.end());
  std::uint64_t journal_seq = 0;
  std::map<std::string, EpochSeconds> last;
  {
    std::shared_lock lock(p->journal_mu);
    for (const auto& a : p->journal) {
      last[a.cell_id] = a.timestamp;
      journal_seq = a.seq;
    }
  }
  const auto snap = run_pipeline(*data, p->config, scope, last);
  const auto doc = ranopt::snapshot_document(snap);

  AnalysisResult result;
  result.digest = sha256_hex(doc);
  const auto existing = impl_->snapshot_ids(*p);
  const std::uint64_t n = existing.empty() ? 1 : std::stoull(existing.back().substr(1)) + 1;
  result.snapshot_id = padded_id('s', n);
  json record{{"snapshot_id", result.snapshot_id},
              {"project_id", project_id},
              {"digest", result.digest},
              {"created_at", now_seconds()},
              {"journal_seq", journal_seq},
              {"document", json::parse(doc)}};
  write_file_atomic(p->dir / "snapshots" / (result.snapshot_id + ".json"), record.dump() + "\n");
  return result;
}

ActionRecord OptimizerService::record_action(const std::string& project_id, ActionRecord action) {
  auto p = impl_->project(project_id);
  if (!impl_->in_scope(*p, action.cell_id)) {
    throw Error(ErrorCode::not_found, "cell " + action.cell_id + " is not in the scope of project " + project_id);
  }
  if (action.kind != kActionAzimuthTuned && action.kind != kActionOther) {
    throw Error(ErrorCode::validation, "unknown action kind " + action.kind);
  }
  std::unique_lock lock(p->journal_mu);
  if (!action.idempotency_key.empty()) {
    for (const auto& a : p->journal) {
      if (a.idempotency_key == action.idempotency_key) return a;
    }
  }
  if (!p->journal.empty() && action.timestamp < p->journal.back().timestamp) {
    throw Error(ErrorCode::validation, "action timestamp " + std::to_string(action.timestamp) +
                                           " precedes the last journal entry at " +
                                           std::to_string(p->journal.back().timestamp));
  }
  action.project_id = project_id;
  action.seq = p->journal.empty() ? 1 : p->journal.back().seq + 1;
  std::ofstream f(p->dir / "journal.jsonl", std::ios::binary | std::ios::app);
  f << action_json(action).dump() << '\n';
  f.flush();
  if (!f) throw Error(ErrorCode::io_error, "cannot append to the journal of project " + project_id);
  p->journal.push_back(action);
  return action;
}

std::vector<ActionRecord> OptimizerService::journal(const std::string& project_id) const {
  auto p = impl_->project(project_id);
  std::shared_lock lock(p->journal_mu);
  return p->journal;
}

std::map<std::string, EpochSeconds> OptimizerService::cooldown_state(const std::string& project_id) const {
  std::map<std::string, EpochSeconds> last;
  for (const auto& a : journal(project_id)) last[a.cell_id] = a.timestamp;
  return last;
}

TimeSeriesResult OptimizerService::get_timeseries(const TimeSeriesQuery& q) const {
  auto p = impl_->project(q.project_id);
  if (q.metric == Metric::congestion_pct && q.granularity != Granularity::daily) {
    throw Error(ErrorCode::invalid_argument, "congestion_pct is only available at daily granularity");
  }
  std::string sid;
  if (q.snapshot_id) {
    sid = *q.snapshot_id;
  } else {
    const auto ids = impl_->snapshot_ids(*p);
    if (ids.empty()) throw Error(ErrorCode::not_found, "project " + q.project_id + " has no snapshot");
    sid = ids.back();
  }
  const auto record = impl_->snapshot(*p, sid);
  const auto& doc = record.at("document");
  const auto& cells = doc.at("cells");
  if (std::find(cells.begin(), cells.end(), json(q.cell_id)) == cells.end()) {
    throw Error(ErrorCode::not_found, "cell " + q.cell_id + " is not in snapshot " + sid);
  }

  TimeSeriesResult out;
  out.cell_id = q.cell_id;
  out.metric = q.metric;
  out.granularity = q.granularity;
  out.snapshot_id = sid;

  for (const auto& a : journal(q.project_id)) {
    if (a.cell_id == q.cell_id && a.timestamp >= q.from && a.timestamp < q.to) out.markers.push_back(a);
  }
  if (q.from >= q.to) return out;

  std::set<int> busy, nonbusy;
  if (q.metric == Metric::congestion_pct) {
    for (const auto& c : doc.at("sections").at("cells")) {
      if (c.at("cell_id") != q.cell_id) continue;
      busy = c.at("busy_hours").get<std::set<int>>();
      nonbusy = c.at("nonbusy_hours").get<std::set<int>>();
    }
  }

  // Hourly records are in (cell, bucket) order.
  std::map<EpochSeconds, std::vector<double>> days, busy_days, nonbusy_days;
  for (const auto& h : doc.at("sections").at("hourly")) {
    if (h.at("cell_id") != q.cell_id) continue;
    const auto bucket = h.at("hour_bucket").get<std::int64_t>();
    const EpochSeconds start = bucket * kSecondsPerHour;
    if (start < q.from || start >= q.to) continue;
    const EpochSeconds day = floor_div(start, kSecondsPerDay) * kSecondsPerDay;
    if (q.metric == Metric::congestion_pct) {
      const auto kbps = hourly_value(h, Metric::app_kbps);
      if (!kbps) continue;
      const int hod = hour_of_day(bucket);
      if (busy.contains(hod)) busy_days[day].push_back(*kbps);
      if (nonbusy.contains(hod)) nonbusy_days[day].push_back(*kbps);
      continue;
    }
    const auto v = hourly_value(h, q.metric);
    if (!v) continue;
    if (q.granularity == Granularity::hourly) {
      out.points.push_back({start, *v});
    } else {
      days[day].push_back(*v);
    }
  }
  if (q.metric == Metric::congestion_pct) {
    for (const auto& [day, values] : nonbusy_days) {
      auto b = busy_days.find(day);
      if (b == busy_days.end()) continue;
      const auto c = congestion_indicator(stats::median(values), stats::median(b->second));
      if (c) out.points.push_back({day, *c});
    }
  } else if (q.granularity == Granularity::daily) {
    for (const auto& [day, values] : days) out.points.push_back({day, *stats::median(values)});
  }
  return out;
}

std::string OptimizerService::snapshot_document(const std::string& project_id, const std::string& snapshot_id) const {
  auto p = impl_->project(project_id);
  return impl_->snapshot(*p, snapshot_id).dump();
}

std::string OptimizerService::snapshot_section(const std::string& project_id, const std::string& snapshot_id,
                                               const std::string& section) const {
  if (!report_family_from_string(section)) throw Error(ErrorCode::not_found, "unknown snapshot section " + section);
  auto p = impl_->project(project_id);
  return impl_->snapshot(*p, snapshot_id).at("document").at("sections").at(section).dump();
}

std::string OptimizerService::geo_view(const std::string& project_id, const GeoViewOptions& options) const {
  auto p = impl_->project(project_id);
  const auto data = impl_->dataset(*p, false);
  const auto ids = impl_->snapshot_ids(*p);

  std::map<std::string, json> recs;
  json latest = nullptr;
  if (!ids.empty()) {
    latest = ids.back();
    const auto record = impl_->snapshot(*p, ids.back());
    for (const auto& r : record.at("document").at("sections").at("recommendations")) {
      recs[r.at("cell_id").get<std::string>()] = r;
    }
  }

  std::map<std::string, std::vector<MeasurementSample>> by_cell;
  for (const auto& s : data->samples) {
    if (!options.cell_id || s.cell_id == *options.cell_id) by_cell[s.cell_id].push_back(s);
  }

  json sites = json::array();
  json cells = json::array();
  bool found = !options.cell_id;
  for (const auto& site : data->sites) {
    bool site_used = false;
    for (const auto& cell : site.cells) {
      if (options.cell_id && cell.cell_id != *options.cell_id) continue;
      found = site_used = true;
      const bool scoped = impl_->in_scope(*p, cell.cell_id);
      json c{{"cell_id", cell.cell_id},
             {"site_id", site.site_id},
             {"sector_id", cell.sector_id},
             {"azimuth_deg", cell.azimuth_deg},
             {"in_scope", scoped},
             {"geo", nullptr},
             {"recommendation", nullptr}};
      const auto& samples = by_cell[cell.cell_id];
      try {
        const auto g = cell_geo_summary(samples, site, cell, p->config.geo);
        c["geo"] = {{"centroid", {{"lat", g.centroid.lat}, {"lon", g.centroid.lon}}},
                    {"site_to_centroid_m", g.site_to_centroid_m},
                    {"bearing_site_to_centroid_deg", g.bearing_site_to_centroid_deg},
                    {"radius_p90_m", g.radius_p90_m},
                    {"n_located_samples", g.n_located_samples},
                    {"low_confidence", g.low_confidence}};
      } catch (const Error&) {
      }
      if (auto it = recs.find(cell.cell_id); it != recs.end()) {
        c["recommendation"] = {{"recommended_azimuth_deg", it->second.at("recommended_azimuth_deg")},
                               {"delta_deg", it->second.at("delta_deg")},
                               {"low_confidence", it->second.at("low_confidence")}};
      }
      if (options.include_points && scoped) {
        std::vector<GeoPoint> located;
        for (const auto& s : samples) {
          if (s.location) located.push_back(*s.location);
        }
        json points = json::array();
        const std::size_t n = located.size();
        const std::size_t keep = std::min(n, kMaxGeoPointsPerCell);
        for (std::size_t i = 0; i < keep; ++i) {
          const auto& g = located[i * n / keep];
          points.push_back({g.lat, g.lon});
        }
        c["points"] = std::move(points);
        c["points_total"] = n;
      }
      cells.push_back(std::move(c));
    }
    if (site_used) {
      sites.push_back({{"site_id", site.site_id},
                       {"lat", site.location.lat},
                       {"lon", site.location.lon},
                       {"antenna_height_m", site.antenna_height_m}});
    }
  }
  if (!found) throw Error(ErrorCode::not_found, "unknown cell " + *options.cell_id);
  json out{{"project_id", project_id}, {"snapshot_id", latest}, {"sites", sites}, {"cells", cells}};
  return out.dump();
}

std::string_view to_string(Granularity granularity) {
  return granularity == Granularity::hourly ? "hourly" : "daily";
}

std::optional<Granularity> granularity_from_string(std::string_view name) {
  if (name == "hourly") return Granularity::hourly;
  if (name == "daily") return Granularity::daily;
  return std::nullopt;
}

std::string to_json(const ProjectInfo& project) {
  json j = project_json(project);
  j["snapshots"] = project.snapshots;
  return j.dump();
}

std::string to_json(const ActionRecord& action) { return action_json(action).dump(); }

std::string to_json(const TimeSeriesResult& series) {
  json points = json::array();
  for (const auto& p : series.points) points.push_back({{"bucket", p.bucket_start}, {"value", p.value}});
  json markers = json::array();
  for (const auto& m : series.markers) markers.push_back(action_json(m));
  return json{{"cell_id", series.cell_id},
              {"metric", std::string(to_string(series.metric))},
              {"granularity", std::string(to_string(series.granularity))},
              {"snapshot_id", series.snapshot_id},
              {"points", points},
              {"markers", markers}}
      .dump();
}

namespace {

json parse_body(std::string_view text) {
  try {
    auto j = json::parse(text);
    if (!j.is_object()) throw Error(ErrorCode::validation, "request body must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::validation, std::string("request body is not valid JSON: ") + e.what());
  }
}

std::string required_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw Error(ErrorCode::validation, std::string("missing string field ") + key);
  return it->get<std::string>();
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorCode::validation, "unknown field " + key);
    }
  }
}

}  // namespace

ProjectSpec project_spec_from_json(std::string_view text) {
  const auto j = parse_body(text);
  reject_unknown(j, {"name", "samples_path", "sites_path", "scope", "overrides"});
  ProjectSpec spec;
  spec.name = required_string(j, "name");
  spec.samples_path = required_string(j, "samples_path");
  spec.sites_path = required_string(j, "sites_path");
  if (auto it = j.find("scope"); it != j.end()) {
    if (it->is_string() && it->get<std::string>() == "all") {
      spec.scope = {"*"};
    } else if (it->is_array() && std::all_of(it->begin(), it->end(), [](const json& c) { return c.is_string(); })) {
      spec.scope = it->get<std::vector<std::string>>();
    } else {
      throw Error(ErrorCode::validation, "scope must be an array of cell ids or \"all\"");
    }
  }
  if (auto it = j.find("overrides"); it != j.end()) {
    if (!it->is_object()) throw Error(ErrorCode::validation, "overrides must be an object");
    spec.overrides_json = it->dump();
  }
  return spec;
}

ActionRecord action_from_json(std::string_view text) {
  const auto j = parse_body(text);
  reject_unknown(j, {"cell_id", "kind", "value", "note", "timestamp", "idempotency_key"});
  ActionRecord a;
  a.cell_id = required_string(j, "cell_id");
  if (j.contains("kind")) a.kind = required_string(j, "kind");
  if (auto it = j.find("value"); it != j.end() && !it->is_null()) {
    if (!it->is_number()) throw Error(ErrorCode::validation, "value must be a number");
    a.value = it->get<double>();
  }
  if (j.contains("note")) a.note = required_string(j, "note");
  if (j.contains("idempotency_key")) a.idempotency_key = required_string(j, "idempotency_key");
  auto ts = j.find("timestamp");
  if (ts == j.end() || !ts->is_number_integer()) throw Error(ErrorCode::validation, "timestamp must be epoch seconds");
  a.timestamp = ts->get<EpochSeconds>();
  return a;
}

}  // namespace ranopt
