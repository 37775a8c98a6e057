// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <map>

#include "ranopt/aggregation.hpp"
#include "ranopt/pipeline.hpp"
#include "ranopt/planning.hpp"
#include "ranopt/random.hpp"
#include "ranopt/report.hpp"
#include "ranopt/sensitivity.hpp"
#include "ranopt/synth.hpp"

namespace {

using namespace ranopt;

const GeneratedScenario& scenario(int sites) {
  static std::map<int, GeneratedScenario> cache;
  auto it = cache.find(sites);
  if (it == cache.end()) {
    ReferenceOptions o;
    o.n_sites = sites;
    it = cache.emplace(sites, generate_scenario(reference_scenario(o))).first;
  }
  return it->second;
}

void BM_AggregateHourly(benchmark::State& state) {
  const auto& s = scenario(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_hourly(s.samples));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.samples.size()));
}
BENCHMARK(BM_AggregateHourly)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_FitSensitivity(benchmark::State& state) {
  PortableRng rng(3);
  std::vector<XYPoint> pts;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    const double x = rng.uniform(-120, -80);
    pts.push_back({x, 30000 + 200 * x + rng.normal(0, 150)});
  }
  const auto params = default_sensitivity_params(Metric::rsrp_dbm);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_sensitivity(pts, "c", Metric::rsrp_dbm, Metric::app_kbps, params));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitSensitivity)->Arg(2000)->Arg(20000)->Unit(benchmark::kMicrosecond);

void BM_DemandRegressions(benchmark::State& state) {
  PortableRng rng(4);
  std::vector<CellHourlyAggregate> hourly;
  for (int i = 0; i < 24 * 7 * 12; ++i) {
    CellHourlyAggregate h;
    h.cell_id = "c";
    h.hour_bucket = i;
    h.num_samples = 1 + rng.below(120);
    h.total_bytes = 50000.0 * static_cast<double>(h.num_samples);
    hourly.push_back(h);
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_demand_regressions(hourly));
}
BENCHMARK(BM_DemandRegressions)->Unit(benchmark::kMicrosecond);

void BM_Pipeline(benchmark::State& state) {
  const auto& s = scenario(static_cast<int>(state.range(0)));
  const Dataset d{s.samples, s.sites};
  for (auto _ : state) benchmark::DoNotOptimize(snapshot_digest(run_pipeline(d)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.samples.size()));
}
BENCHMARK(BM_Pipeline)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
