// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "ranopt/digest.hpp"
#include "ranopt/error.hpp"
#include "ranopt/geo.hpp"
#include "ranopt/ingest.hpp"
#include "ranopt/synth.hpp"
#include "support.hpp"

namespace ranopt {
namespace {

ScenarioSpec small() {
  ReferenceOptions o;
  o.seed = 7;
  o.n_sites = 10;
  o.days = 7;
  return reference_scenario(o);
}

TEST(Generate, PureFunctionOfTheSpec) {
  const auto a = generate_scenario(small());
  const auto b = generate_scenario(small());
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.sites, b.sites);
  EXPECT_EQ(a.truth.dataset_digest, b.truth.dataset_digest);
  EXPECT_EQ(a.truth.dataset_digest, dataset_digest(a.samples, a.sites));

  auto other = small();
  other.seed = 8;
  EXPECT_NE(generate_scenario(other).truth.dataset_digest, a.truth.dataset_digest);
}

TEST(Generate, ReferenceShape) {
  const auto& ref = test::reference();
  EXPECT_EQ(ref.sites.size(), 20u);
  EXPECT_EQ(ref.truth.cells.size(), 60u);
  EXPECT_EQ(ref.truth.days, 14);
  ASSERT_EQ(ref.truth.swaps.size(), 1u);
  std::size_t strong = 0, suppressed = 0, faults = 0, worst = 0;
  for (const auto& s : ref.truth.sites) strong += s.expected_strong_location_audit;
  for (const auto& c : ref.truth.cells) {
    suppressed += c.expected_suppressed;
    faults += c.fault.has_value();
    worst += c.planted_worst_kbps;
  }
  EXPECT_EQ(strong, 1u);
  EXPECT_GT(suppressed, 0u);
  EXPECT_EQ(faults, 3u);
  EXPECT_EQ(worst, 3u);
  for (const auto& s : ref.samples) {
    ASSERT_TRUE(s.app_kbps);
    EXPECT_NE(ref.truth.cell(s.cell_id), nullptr);
  }
}

TEST(Generate, SwapExchangesRecordedAzimuths) {
  const auto& ref = test::reference();
  const auto& swap = ref.truth.swaps.front();
  const auto* a = ref.truth.cell(swap.cell_a);
  const auto* b = ref.truth.cell(swap.cell_b);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(swap.corrected_a_deg, b->recorded_azimuth_deg);
  EXPECT_EQ(swap.corrected_b_deg, a->recorded_azimuth_deg);
  // Each record points roughly where the partner really serves.
  EXPECT_LE(std::abs(geo::azimuth_delta(a->recorded_azimuth_deg, b->true_boresight_deg)), 10.0);
  EXPECT_LE(std::abs(geo::azimuth_delta(b->recorded_azimuth_deg, a->true_boresight_deg)), 10.0);
}

TEST(Validate, NamesTheOffendingField) {
  auto spec = small();
  spec.days = 0;
  try {
    validate(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::validation);
    EXPECT_NE(std::string(e.what()).find("days"), std::string::npos) << e.what();
  }
  spec = small();
  spec.sites[0].cells[0].base_kbps = -1;
  EXPECT_THROW(generate_scenario(spec), Error);
  spec = small();
  spec.swaps.push_back({"nope", "S00-0"});
  EXPECT_THROW(validate(spec), Error);
}

TEST(GroundTruth, RoundTripsThroughJsonl) {
  const auto& truth = test::reference().truth;
  std::stringstream io;
  write_ground_truth(io, truth);
  const auto back = read_ground_truth(io);
  EXPECT_EQ(back.dataset_digest, truth.dataset_digest);
  EXPECT_EQ(back.seed, truth.seed);
  ASSERT_EQ(back.cells.size(), truth.cells.size());
  for (std::size_t i = 0; i < back.cells.size(); ++i) {
    EXPECT_EQ(back.cells[i].cell_id, truth.cells[i].cell_id);
    EXPECT_EQ(back.cells[i].expected_congestion_pct, truth.cells[i].expected_congestion_pct);
    EXPECT_EQ(back.cells[i].expected_gain_bytes, truth.cells[i].expected_gain_bytes);
    EXPECT_EQ(back.cells[i].fault, truth.cells[i].fault);
  }
  ASSERT_EQ(back.swaps.size(), 1u);
  EXPECT_EQ(back.swaps[0].corrected_b_deg, truth.swaps[0].corrected_b_deg);

  std::istringstream bad("{\"schema\":\"other\"}\n");
  EXPECT_THROW(read_ground_truth(bad), Error);
}

TEST(ScenarioFiles, IngestBackToTheSameDigest) {
  test::TempDir dir("synth");
  const auto scenario = generate_scenario(small());
  write_scenario_files(scenario, dir.path());
  std::ifstream samples(dir.path() / "samples.csv"), sites(dir.path() / "sites.csv");
  const auto s = parse_samples(samples);
  const auto c = parse_site_config(sites);
  EXPECT_TRUE(s.rejects.empty());
  EXPECT_TRUE(c.rejects.empty());
  EXPECT_EQ(dataset_digest(s.samples, c.sites), scenario.truth.dataset_digest);
  EXPECT_EQ(read_ground_truth_file(dir.path() / "truth.jsonl").dataset_digest, scenario.truth.dataset_digest);
}

TEST(Scorecard, ReferenceRunPassesEveryCheck) {
  const auto card = evaluate_engine(test::reference().truth, test::reference_snapshot());
  for (const auto& c : card.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.measured << " " << c.detail;
  EXPECT_TRUE(card.all_passed());
  EXPECT_GE(card.checks.size(), 10u);
}

TEST(Scorecard, EmptySnapshotFailsEveryCheck) {
  const auto card = evaluate_engine(test::reference().truth, AnalysisSnapshot{});
  ASSERT_FALSE(card.checks.empty());
  for (const auto& c : card.checks) EXPECT_FALSE(c.passed) << c.name;
  EXPECT_FALSE(card.all_passed());
}

TEST(Scorecard, ForeignSnapshotIsAMismatch) {
  AnalysisSnapshot snap;
  snap.dataset_digest = std::string(64, '0');
  try {
    evaluate_engine(test::reference().truth, snap);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::scenario_mismatch);
  }
}

}  // namespace
}  // namespace ranopt
