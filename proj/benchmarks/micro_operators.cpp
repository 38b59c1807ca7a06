#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "cycip/operators.hpp"
#include "cycip/random.hpp"

using namespace cycip;

namespace {

Vector random_vector(SplitMix64& g, std::size_t n, double lo, double hi) {
  Vector v(n);
  for (auto& e : v) e = g.uniform(lo, hi);
  return v;
}

void BM_IntrepidHyperplane(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SplitMix64 g(1);
  const IntrepidProjector q(std::make_shared<Hyperplane>(random_vector(g, n, -1, 1), 0.5), 0.25);
  const Vector x0 = random_vector(g, n, -3, 3);
  Vector x = x0;
  for (auto _ : state) {
    x = x0;
    q.apply_in_place(x);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_IntrepidHyperplane)->RangeMultiplier(8)->Range(8, 4096);

void BM_RelaxedSlab(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SplitMix64 g(2);
  const RelaxedProjector r(std::make_shared<Hyperslab>(random_vector(g, n, -1, 1), -0.5, 0.5), 1.5);
  const Vector x0 = random_vector(g, n, -3, 3);
  Vector x = x0;
  for (auto _ : state) {
    x = x0;
    r.apply_in_place(x);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RelaxedSlab)->RangeMultiplier(8)->Range(8, 4096);

// Many two-coordinate slabs with disjoint supports, as in a road slope family.
void BM_BlockIntrepid(benchmark::State& state) {
  const auto blocks = static_cast<std::size_t>(state.range(0));
  const std::size_t n = 2 * blocks;
  SplitMix64 g(3);
  std::vector<Hyperslab> slabs;
  for (std::size_t b = 0; b < blocks; ++b) {
    Vector a(n, 0.0);
    a[2 * b] = -1.0;
    a[2 * b + 1] = 1.0;
    slabs.emplace_back(a, -0.1, 0.1);
  }
  const BlockIntrepidProjector q(std::make_shared<SlabFamily>(n, std::move(slabs)));
  const Vector x0 = random_vector(g, n, -1, 1);
  Vector x = x0;
  for (auto _ : state) {
    x = x0;
    q.apply_in_place(x);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(blocks));
}
BENCHMARK(BM_BlockIntrepid)->RangeMultiplier(4)->Range(16, 4096);

}  // namespace
