#include <benchmark/benchmark.h>

#include "bacepipe/cost_model.hpp"
#include "bacepipe/placement.hpp"
#include "bacepipe/scenario.hpp"
#include "bacepipe/simulator.hpp"
#include "bacepipe/sweep.hpp"

using namespace bacepipe;

static void BM_Pathfinder(benchmark::State& state) {
  Scenario s = default_scenario();
  auto cluster = build_cluster(s);
  const JobSpec& job = s.jobs[0];
  int k_star = optimal_gpu_count(job, cluster.total_gpu_capacity(), s.profile);
  for (auto _ : state) {
    auto plan = find_path(job, cluster, k_star, s.profile);
    benchmark::DoNotOptimize(plan);
  }
}
BENCHMARK(BM_Pathfinder);

static void BM_OptimalGpuCount(benchmark::State& state) {
  Scenario s = default_scenario();
  for (auto _ : state)
    for (const JobSpec& j : s.jobs)
      benchmark::DoNotOptimize(optimal_gpu_count(j, 336, s.profile));
}
BENCHMARK(BM_OptimalGpuCount);

static void BM_SimulateFleet(benchmark::State& state) {
  Scenario s = default_scenario();
  auto policy = *policy_from_name(state.range(0) == 0 ? "BACE" : "CR-LDF");
  for (auto _ : state) {
    auto report = run(s, policy, 0);
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_SimulateFleet)->Arg(0)->Arg(1);

static void BM_BandwidthSweep(benchmark::State& state) {
  Scenario s = default_scenario();
  SweepSpec spec;
  spec.axis = SweepAxis::Bandwidth;
  spec.values = default_sweep_values(SweepAxis::Bandwidth);
  for (auto _ : state) {
    auto result = run_sweep(s, spec, 0);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_BandwidthSweep);

BENCHMARK_MAIN();
