// SPDX-License-Identifier: Apache-2.0
//
// ranopt: command line front end of the analytics engine.
//
// Exit codes: 0 full success; 2 output produced but incomplete (rejected
// input lines, per-cell module errors, failed scorecard checks); 1 fatal.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ranopt/config.hpp"
#include "ranopt/digest.hpp"
#include "ranopt/error.hpp"
#include "ranopt/http.hpp"
#include "ranopt/ingest.hpp"
#include "ranopt/pipeline.hpp"
#include "ranopt/report.hpp"
#include "ranopt/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ranopt;

namespace {

constexpr int kOk = 0;
constexpr int kFatal = 1;
constexpr int kPartial = 2;

struct DataOptions {
  std::string samples;
  std::string sites;
  std::string config;
  std::vector<std::string> sets;
  std::vector<std::string> scope;
  std::string journal;
  std::string out;
};

void add_data_options(CLI::App* cmd, DataOptions& o) {
  cmd->add_option("--samples", o.samples, "Measurement samples CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--sites", o.sites, "Site configuration CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--config", o.config, "Engine configuration JSON")->check(CLI::ExistingFile);
  cmd->add_option("--set", o.sets, "Override one config value, e.g. optimization.k=5 (repeatable)");
  cmd->add_option("--scope", o.scope, "Cells to analyze (default: every cell with samples)")->delimiter(',');
  cmd->add_option("--journal", o.journal, "Action journal (JSONL) feeding the tuning cooldown")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "Write one <family>.jsonl per report into this directory");
}

// "a.b.c=value" -> {"a": {"b": {"c": value}}}; the value is JSON when it
// parses as JSON and a string otherwise.
json override_object(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorCode::validation, "--set expects key.path=value, got " + assignment);
  }
  const auto text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  std::vector<std::string> keys;
  std::stringstream path(assignment.substr(0, eq));
  for (std::string k; std::getline(path, k, '.');) keys.push_back(k);
  for (auto it = keys.rbegin(); it != keys.rend(); ++it) value = json{{*it, value}};
  return value;
}

EngineConfig load_config(const DataOptions& o) {
  EngineConfig config;
  if (!o.config.empty()) config = load_config_file(o.config, config);
  for (const auto& s : o.sets) config = apply_config_json(override_object(s).dump(), config);
  return config;
}

struct Loaded {
  Dataset data;
  std::size_t rejected = 0;
};

Loaded load_dataset(const DataOptions& o) {
  Loaded l;
  auto samples = parse_samples_file(o.samples);
  auto sites = parse_site_config_file(o.sites);
  l.rejected = samples.rejects.size() + sites.rejects.size();
  if (l.rejected > 0) {
    std::cerr << "warning: " << samples.rejects.size() << " sample and " << sites.rejects.size()
              << " site lines rejected (run `ranopt ingest` for details)\n";
  }
  l.data.samples = std::move(samples.samples);
  l.data.sites = std::move(sites.sites);
  return l;
}

std::map<std::string, EpochSeconds> read_journal(const std::string& path) {
  std::map<std::string, EpochSeconds> last;
  if (path.empty()) return last;
  std::ifstream f(path);
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto j = json::parse(line);
    last[j.at("cell_id").get<std::string>()] = j.at("timestamp").get<EpochSeconds>();
  }
  return last;
}

bool module_matches(const std::string& module, const std::vector<std::string>& prefixes) {
  for (const auto& p : prefixes) {
    if (module.rfind(p, 0) == 0) return true;
  }
  return false;
}

// Runs the pipeline and emits `families`: the first to stdout when no output
// directory is given, all of them (plus errors.jsonl) as files otherwise.
int run_report_verb(const DataOptions& o, const std::vector<ReportFamily>& families,
                    const std::vector<std::string>& error_modules) {
  const auto config = load_config(o);
  const auto loaded = load_dataset(o);
  const CellScope scope(o.scope.begin(), o.scope.end());
  const auto snapshot = run_pipeline(loaded.data, config, scope, read_journal(o.journal));

  std::size_t module_errors = 0;
  for (const auto& e : snapshot.errors) {
    if (!module_matches(e.module, error_modules)) continue;
    ++module_errors;
    std::cerr << "error: " << e.cell_id << " [" << e.module << "] " << e.message << '\n';
  }

  if (o.out.empty()) {
    write_report_jsonl(std::cout, snapshot, families.front());
  } else {
    fs::create_directories(o.out);
    auto all = families;
    all.push_back(ReportFamily::errors);
    for (auto family : all) {
      const auto path = fs::path(o.out) / (std::string(to_string(family)) + ".jsonl");
      std::ofstream f(path, std::ios::binary);
      write_report_jsonl(f, snapshot, family);
      if (!f) throw Error(ErrorCode::io_error, "cannot write " + path.string());
    }
    std::ofstream(fs::path(o.out) / "snapshot.sha256") << snapshot_digest(snapshot) << '\n';
  }
  return loaded.rejected == 0 && module_errors == 0 ? kOk : kPartial;
}

int run_ingest(const DataOptions& o) {
  const auto samples = parse_samples_file(o.samples);
  const auto sites = parse_site_config_file(o.sites);
  const auto joined = join_samples_to_sites(samples.samples, sites.sites);
  std::size_t unconfigured = 0;
  for (const auto& [cell, list] : joined.unconfigured) unconfigured += list.size();

  json summary{{"sample_lines", samples.data_lines},
               {"samples_accepted", samples.samples.size()},
               {"samples_rejected", samples.rejects.size()},
               {"site_lines", sites.data_lines},
               {"sites_rejected", sites.rejects.size()},
               {"configured_cells", joined.groups.size()},
               {"unconfigured_samples", unconfigured}};
  std::cout << summary.dump(2) << '\n';

  if (!o.out.empty()) {
    fs::create_directories(o.out);
    std::ofstream s(fs::path(o.out) / "samples.csv", std::ios::binary);
    write_samples_csv(s, samples.samples);
    std::ofstream c(fs::path(o.out) / "sites.csv", std::ios::binary);
    write_sites_csv(c, sites.sites);
    std::ofstream r(fs::path(o.out) / "rejects.jsonl", std::ios::binary);
    auto dump = [&r](const char* file, const std::vector<RejectRecord>& rejects) {
      for (const auto& x : rejects) {
        r << json{{"file", file},
                  {"line", x.line_number},
                  {"reason", std::string(to_string(x.reason))},
                  {"detail", x.detail},
                  {"raw", x.raw}}
                 .dump()
          << '\n';
      }
    };
    dump("samples", samples.rejects);
    dump("sites", sites.rejects);
    std::ofstream(fs::path(o.out) / "dataset.sha256") << dataset_digest(samples.samples, sites.sites) << '\n';
  }
  return samples.rejects.empty() && sites.rejects.empty() ? kOk : kPartial;
}

struct SynthOptions {
  std::string out;
  ReferenceOptions ref;
};

int run_synth(const SynthOptions& o) {
  const auto scenario = generate_scenario(reference_scenario(o.ref));
  write_scenario_files(scenario, o.out);
  std::cout << json{{"scenario_id", scenario.truth.scenario_id},
                    {"samples", scenario.samples.size()},
                    {"cells", scenario.truth.cells.size()},
                    {"dataset_digest", scenario.truth.dataset_digest}}
                   .dump(2)
            << '\n';
  return kOk;
}

int run_evaluate(const DataOptions& o, const std::string& truth_path) {
  const auto truth = read_ground_truth_file(truth_path);
  const auto config = load_config(o);
  const auto loaded = load_dataset(o);
  const CellScope scope(o.scope.begin(), o.scope.end());
  const auto snapshot = run_pipeline(loaded.data, config, scope, read_journal(o.journal));
  const auto card = evaluate_engine(truth, snapshot);

  json checks = json::array();
  for (const auto& c : card.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " measured=" << c.measured
              << " tolerance=" << c.tolerance;
    if (!c.detail.empty()) std::cout << " (" << c.detail << ')';
    std::cout << '\n';
    checks.push_back(
        {{"name", c.name}, {"passed", c.passed}, {"measured", c.measured}, {"tolerance", c.tolerance}, {"detail", c.detail}});
  }
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    std::ofstream(fs::path(o.out) / "scorecard.json")
        << json{{"scenario_id", card.scenario_id}, {"all_passed", card.all_passed()}, {"checks", checks}}.dump(2)
        << '\n';
  }
  return card.all_passed() && loaded.rejected == 0 ? kOk : kPartial;
}

HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int run_serve(const std::string& root, const std::string& host, int port) {
  OptimizerService service(root);
  HttpServer server(service);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "serving " << fs::absolute(root).string() << " on http://" << host << ':' << port << '\n';
  server.run(host, port);
  g_server = nullptr;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RAN experience analytics: diagnostics, RF tuning and capacity planning"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ranopt 0.1.0");

  DataOptions data;
  std::string truth;
  SynthOptions synth;
  std::string root = "ranopt-projects";
  std::string host = "127.0.0.1";
  int port = 8080;

  auto* ingest = app.add_subcommand("ingest", "Validate input files; --out writes canonical CSV and rejects.jsonl");
  add_data_options(ingest, data);

  struct Verb {
    const char* name;
    const char* help;
    std::vector<ReportFamily> families;
    std::vector<std::string> modules;
  };
  const std::vector<Verb> verbs{
      {"aggregate", "Cell profiles, busy hours and hourly aggregates",
       {ReportFamily::cells, ReportFamily::hourly}, {"aggregation", "busy_hours"}},
      {"detect", "Anomalies with root causes", {ReportFamily::anomalies}, {"aggregation", "root_cause"}},
      {"sensitivity", "Binned local slopes of experience against radio metrics",
       {ReportFamily::sensitivity}, {"aggregation", "sensitivity"}},
      {"recommend", "Azimuth recommendations, tuning batch and configuration audits",
       {ReportFamily::recommendations, ReportFamily::tuning, ReportFamily::audits}, {"aggregation", "rf_tuning"}},
      {"plan", "Suppression, upgrade gain, exhaustion and densification", {ReportFamily::planning},
       {"aggregation", "planning"}},
  };
  std::vector<CLI::App*> verb_cmds;
  for (const auto& v : verbs) verb_cmds.push_back(app.add_subcommand(v.name, v.help));
  for (auto* cmd : verb_cmds) add_data_options(cmd, data);

  auto* synth_cmd = app.add_subcommand("synth", "Generate the reference synthetic scenario with ground truth");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--seed", synth.ref.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--n-sites", synth.ref.n_sites, "Number of sites")->capture_default_str()->check(CLI::Range(1, 10000));
  synth_cmd->add_option("--cells-per-site", synth.ref.cells_per_site, "Sectors per site")
      ->capture_default_str()
      ->check(CLI::Range(1, 6));
  synth_cmd->add_option("--days", synth.ref.days, "Days of data")->capture_default_str()->check(CLI::Range(7, 365));
  synth_cmd->add_option("--bytes-noise", synth.ref.bytes_noise, "Relative noise on per-sample bytes")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));

  auto* evaluate = app.add_subcommand("evaluate", "Score engine output against a scenario's ground truth");
  add_data_options(evaluate, data);
  evaluate->add_option("--truth", truth, "Ground truth JSONL")->required()->check(CLI::ExistingFile);

  auto* serve = app.add_subcommand("serve", "Run the optimizer HTTP service");
  serve->add_option("--root", root, "Project store directory")->capture_default_str();
  serve->add_option("--host", host, "Listen address")->capture_default_str();
  serve->add_option("--port", port, "Listen port")->capture_default_str()->check(CLI::Range(1, 65535));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return run_ingest(data);
    for (std::size_t i = 0; i < verbs.size(); ++i) {
      if (*verb_cmds[i]) return run_report_verb(data, verbs[i].families, verbs[i].modules);
    }
    if (*synth_cmd) return run_synth(synth);
    if (*evaluate) return run_evaluate(data, truth);
    if (*serve) return run_serve(root, host, port);
  } catch (const Error& e) {
    std::cerr << "ranopt: " << e.what() << '\n';
    return kFatal;
  } catch (const std::exception& e) {
    std::cerr << "ranopt: " << e.what() << '\n';
    return kFatal;
  }
  return kFatal;
}
