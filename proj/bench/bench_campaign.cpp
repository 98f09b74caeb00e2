// Serial reference vs OpenMP kernels on a reduced campaign and on exact
// enumeration. Arg = OpenMP team size (0 = default).

#include <benchmark/benchmark.h>

#include "platoon/montecarlo.hpp"
#include "platoon/oracle.hpp"

using namespace platoon;

namespace {

CampaignConfig bench_campaign(Mode mode) {
  CampaignConfig c;
  c.scenario.mode = mode;
  c.scenario.clamp_reverse = default_clamp_reverse(mode);
  c.dist = DecelDistribution::standin(DecelDistribution::default_support());
  c.iterations = 200;
  c.leader_sweep = {5.75, 7.75, 9.75};
  return c;
}

void BM_CampaignSerial(benchmark::State& state) {
  const CampaignConfig c = bench_campaign(static_cast<Mode>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_campaign_serial(c));
  state.SetItemsProcessed(state.iterations() * c.iterations * 3);
}

void BM_CampaignParallel(benchmark::State& state) {
  CampaignConfig c = bench_campaign(static_cast<Mode>(state.range(0)));
  c.threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(run_campaign(c));
  state.SetItemsProcessed(state.iterations() * c.iterations * 3);
}

void BM_EnumerateSerial(benchmark::State& state) {
  ScenarioConfig s;
  s.followers = 3;
  const auto dist = DecelDistribution::uniform(DecelDistribution::default_support());
  for (auto _ : state)
    benchmark::DoNotOptimize(enumerate_exact_serial(s, dist, 8.75));
}

void BM_EnumerateParallel(benchmark::State& state) {
  ScenarioConfig s;
  s.followers = 3;
  const auto dist = DecelDistribution::uniform(DecelDistribution::default_support());
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(enumerate_exact(s, dist, 8.75, threads));
}

}  // namespace

BENCHMARK(BM_CampaignSerial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CampaignParallel)
    ->ArgsProduct({{0, 1}, {1, 2, 4, 0}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_EnumerateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnumerateParallel)
    ->Arg(1)->Arg(2)->Arg(4)->Arg(0)
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
