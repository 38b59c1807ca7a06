#include <benchmark/benchmark.h>

#include "cycip/road.hpp"
#include "cycip/solver.hpp"

using namespace cycip;

namespace {

// One full sweep over the six road sets.
void BM_RoadSweep(benchmark::State& state) {
  const auto gen = road::generate_problem(static_cast<std::size_t>(state.range(0)), 11);
  const auto fp = road::make_feasibility_problem(gen.problem);
  const Vector x0 = road::default_start(gen.problem);
  Vector x = x0;
  for (auto _ : state) {
    x = x0;
    for (std::size_t i = 0; i < fp.size(); ++i) fp.op(i).apply_in_place(x);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RoadSweep)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oN);

void BM_InfeasibilityDinf(benchmark::State& state) {
  const auto gen = road::generate_problem(static_cast<std::size_t>(state.range(0)), 12);
  const auto fp = road::make_feasibility_problem(gen.problem);
  const Vector x = road::default_start(gen.problem);
  for (auto _ : state) benchmark::DoNotOptimize(infeasibility_dinf(fp, x));
}
BENCHMARK(BM_InfeasibilityDinf)->RangeMultiplier(4)->Range(64, 4096);

void BM_SolveCycIPinf(benchmark::State& state) {
  const auto gen = road::generate_problem(static_cast<std::size_t>(state.range(0)), 13);
  const auto fp = road::make_feasibility_problem(gen.problem);
  const Vector x0 = road::default_start(gen.problem);
  SolverConfig cfg;
  cfg.control = ControlSchedule::cyclic(fp.size());
  for (auto _ : state) benchmark::DoNotOptimize(run_cycip(fp, cfg, x0).iterations);
}
BENCHMARK(BM_SolveCycIPinf)->Arg(341)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
