// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "ranopt/synth.hpp"
#include "support.hpp"

namespace ranopt {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Run {
  int code = -1;
  std::string out;
};

Run ranopt(const std::string& args) {
  const std::string cmd = std::string(RANOPT_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new test::TempDir("cli");
    const auto r = ranopt("synth --out " + (dir_->path() / "ref").string());
    ASSERT_EQ(r.code, 0);
    ASSERT_EQ(json::parse(r.out).at("dataset_digest"), test::reference().truth.dataset_digest);
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static std::string data_args() {
    const auto ref = dir_->path() / "ref";
    return "--samples " + (ref / "samples.csv").string() + " --sites " + (ref / "sites.csv").string();
  }
  static fs::path path(const std::string& leaf) { return dir_->path() / leaf; }
  static test::TempDir* dir_;
};

test::TempDir* Cli::dir_ = nullptr;

TEST_F(Cli, SynthWritesScenarioFiles) {
  for (const char* f : {"samples.csv", "sites.csv", "truth.jsonl"}) EXPECT_TRUE(fs::exists(path("ref") / f)) << f;
  EXPECT_NE(ranopt("synth --out " + path("x").string() + " --days 3").code, 0);
}

TEST_F(Cli, IngestCleanAndWithRejects) {
  auto r = ranopt("ingest " + data_args() + " --out " + path("ingest").string());
  ASSERT_EQ(r.code, 0);
  const auto summary = json::parse(r.out);
  EXPECT_EQ(summary.at("samples_rejected"), 0);
  EXPECT_EQ(summary.at("samples_accepted"), test::reference().samples.size());
  EXPECT_EQ(slurp(path("ingest") / "dataset.sha256"), test::reference().truth.dataset_digest + "\n");
  EXPECT_TRUE(lines_of(path("ingest") / "rejects.jsonl").empty());

  fs::copy_file(path("ref") / "samples.csv", path("dirty.csv"), fs::copy_options::overwrite_existing);
  std::ofstream(path("dirty.csv"), std::ios::app) << "not,a,valid,row\n";
  r = ranopt("ingest --samples " + path("dirty.csv").string() + " --sites " + (path("ref") / "sites.csv").string() +
             " --out " + path("dirty").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.out).at("samples_rejected"), 1);
  const auto rejects = lines_of(path("dirty") / "rejects.jsonl");
  ASSERT_EQ(rejects.size(), 1u);
  EXPECT_EQ(json::parse(rejects[0]).at("file"), "samples");
}

TEST_F(Cli, ReportVerbsWriteTheirFamilies) {
  const std::vector<std::pair<std::string, std::vector<std::string>>> verbs{
      {"aggregate", {"cells", "hourly"}},
      {"detect", {"anomalies"}},
      {"sensitivity", {"sensitivity"}},
      {"recommend", {"recommendations", "tuning", "audits"}},
      {"plan", {"planning"}},
  };
  std::string digest;
  for (const auto& [verb, families] : verbs) {
    const auto out = path("out-" + verb);
    ASSERT_EQ(ranopt(verb + " " + data_args() + " --out " + out.string()).code, 0) << verb;
    for (const auto& f : families) {
      const auto lines = lines_of(out / (f + ".jsonl"));
      EXPECT_FALSE(lines.empty()) << verb << " " << f;
      for (const auto& l : lines) ASSERT_TRUE(json::accept(l)) << l;
    }
    EXPECT_TRUE(lines_of(out / "errors.jsonl").empty());
    const auto d = slurp(out / "snapshot.sha256");
    if (digest.empty()) digest = d;
    EXPECT_EQ(d, digest) << "every verb runs the same pipeline";
  }
  EXPECT_EQ(lines_of(path("out-detect") / "anomalies.jsonl").size(), 3u);

  const auto r = ranopt("detect " + data_args());
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, slurp(path("out-detect") / "anomalies.jsonl"));
}

TEST_F(Cli, ConfigOverridesAndFailures) {
  auto r = ranopt("recommend " + data_args() + " --set optimization.k=2 --out " + path("k2").string());
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(lines_of(path("k2") / "tuning.jsonl").size(), 2u);

  std::ofstream(path("config.json")) << R"({"optimization": {"k": 1}})";
  r = ranopt("recommend " + data_args() + " --config " + path("config.json").string() + " --out " +
             path("k1").string());
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(lines_of(path("k1") / "tuning.jsonl").size(), 1u);

  EXPECT_EQ(ranopt("plan " + data_args() + " --set optimization.kk=2").code, 1);
  EXPECT_EQ(ranopt("plan " + data_args() + " --set novalue").code, 1);
  EXPECT_NE(ranopt("plan --samples /nonexistent.csv --sites /nonexistent.csv").code, 0);
  EXPECT_NE(ranopt("bogus").code, 0);
}

TEST_F(Cli, EvaluateScoresTheReference) {
  auto r = ranopt("evaluate " + data_args() + " --truth " + (path("ref") / "truth.jsonl").string() + " --out " +
                  path("eval").string());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
  EXPECT_TRUE(json::parse(slurp(path("eval") / "scorecard.json")).at("all_passed").get<bool>());

  // A scope of one cell leaves most planted checks unmet.
  r = ranopt("evaluate " + data_args() + " --scope S01-0 --truth " + (path("ref") / "truth.jsonl").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

int free_port() {
  const int fd = socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  close(fd);
  return ntohs(addr.sin_port);
}

TEST_F(Cli, ServeAnswersOverHttpAndStopsOnSignal) {
  const int port = free_port();
  const auto pidfile = path("serve.pid");
  const std::string cmd = std::string(RANOPT_CLI_PATH) + " serve --root " + path("store").string() + " --port " +
                          std::to_string(port) + " >/dev/null 2>&1 & echo $! > " + pidfile.string();
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  const pid_t pid = std::stoi(slurp(pidfile));

  httplib::Client client("127.0.0.1", port);
  httplib::Result res;
  for (int i = 0; i < 100 && !(res = client.Get("/projects/p000001")); ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  ASSERT_TRUE(res) << "server did not come up";
  EXPECT_EQ(res->status, 404);
  EXPECT_EQ(json::parse(res->body).at("error"), "not_found");

  const json create{{"name", "cli"},
                    {"samples_path", (path("ref") / "samples.csv").string()},
                    {"sites_path", (path("ref") / "sites.csv").string()},
                    {"scope", json::array({"S02-0", "S02-1"})}};
  res = client.Post("/projects", create.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201) << res->body;
  res = client.Get("/projects/p000001");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body).at("scope").size(), 2u);

  kill(pid, SIGTERM);
  bool stopped = false;
  for (int i = 0; i < 100 && !stopped; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    httplib::Client probe("127.0.0.1", port);
    probe.set_connection_timeout(0, 200000);
    stopped = !probe.Get("/projects/p000001");
  }
  EXPECT_TRUE(stopped);
  EXPECT_TRUE(fs::exists(path("store")));
}

}  // namespace
}  // namespace ranopt
