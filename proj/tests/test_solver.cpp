#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cycip/solver.hpp"
#include "support.hpp"

using namespace cycip;
using testing::Vec;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

FeasibilityProblem two_intervals() {
  FeasibilityProblem p(1);
  p.add_intrepid(std::make_shared<Singleton>(Vec{1}), 1.0, "C1");
  p.add_intrepid(std::make_shared<Singleton>(Vec{2}), 1.0, "C2");
  return p;
}

// Slabs {0 <= x0 <= 2} and {2 <= x0 <= 4}; they meet in the line x0 = 2.
FeasibilityProblem touching_slabs() {
  FeasibilityProblem p(2);
  p.add_intrepid(std::make_shared<Hyperplane>(Vec{1, 0}, 1.0), 1.0);
  p.add_intrepid(std::make_shared<Hyperplane>(Vec{1, 0}, 3.0), 1.0);
  return p;
}

SolverConfig config_for(const FeasibilityProblem& p) {
  SolverConfig c;
  c.control = ControlSchedule::cyclic(p.size());
  return c;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("feasible start needs no iterations") {
  const auto p = two_intervals();
  auto cfg = config_for(p);
  const auto r = run_cycip(p, cfg, Vec{1.5});
  CHECK(r.status == SolveStatus::solved);
  CHECK(r.iterations == 0);
  CHECK(r.point == Vec{1.5});
  CHECK(r.d2 == 0.0);
}

TEST_CASE("two intervals hand trace") {
  const auto p = two_intervals();
  auto cfg = config_for(p);
  cfg.trace = TraceDepth::full;
  const auto r = run_cycip(p, cfg, Vec{5});
  CHECK(r.status == SolveStatus::solved);
  CHECK(r.point == Vec{1});
  CHECK(r.iterations == 2);
  REQUIRE(r.trace.iterates.size() == 3);
  CHECK(r.trace.iterates[1] == Vec{1});
  CHECK(r.trace.iterates[2] == Vec{1});
  CHECK(r.trace.indices == std::vector<std::size_t>{0, 1});
  CHECK(fejer_margin(r.trace, Vec{1}) <= 0.0);
  CHECK_FALSE(r.heuristic);
}

TEST_CASE("touching slabs oscillate") {
  const auto p = touching_slabs();
  auto cfg = config_for(p);
  cfg.max_iterations = 1000;
  cfg.trace = TraceDepth::full;
  const auto r = run_cycip(p, cfg, Vec{5, 1});
  CHECK(r.status == SolveStatus::iteration_limit);
  CHECK(r.iterations == 1000);
  const auto& it = r.trace.iterates;
  for (std::size_t k = 10; k + 2 < it.size(); ++k) {
    CHECK(distance2(it[k + 2], it[k]) < 1e-8);
    CHECK(distance2(it[k + 1], it[k]) > 1e-3);
    CHECK(std::abs(it[k][0] - 2.0) >= 1.0);
  }
}

TEST_CASE("time limit stops a run that cannot converge") {
  const auto p = touching_slabs();
  auto cfg = config_for(p);
  cfg.max_iterations = std::numeric_limits<std::uint64_t>::max();
  cfg.max_time = std::chrono::duration<double>(0.05);
  const auto r = run_cycip(p, cfg, Vec{5, 1});
  CHECK(r.status == SolveStatus::time_limit);
  CHECK(r.wall_time.count() >= 0.05);
  CHECK(r.wall_time.count() < 5.0);
}

TEST_CASE("d2 measure") {
  FeasibilityProblem p(2);
  p.add_relaxed(std::make_shared<Hyperslab>(Vec{1, 0}, -kInf, 0.0));
  p.add_relaxed(std::make_shared<Hyperslab>(Vec{0, 1}, -kInf, 0.0));
  CHECK(infeasibility_d2(p, Vec{-1, -1}) == 0.0);
  CHECK(infeasibility_d2(p, Vec{3, 0}) == 3.0);
  CHECK(infeasibility_d2(p, Vec{3, 4}) == 5.0);
  CHECK(infeasibility_dinf(p, Vec{3, 4}) == 4.0);
  CHECK_THROWS_AS(infeasibility_d2(p, Vec{1}), DimensionError);
}

TEST_CASE("dinf measure") {
  FeasibilityProblem one(3);
  one.add_relaxed(std::make_shared<Hyperslab>(Vec{2, 0, -1}, -1.0, 0.0));
  CHECK(infeasibility_dinf(one, Vec{2.5, 0, 0}) == 2.0);
  CHECK(infeasibility_dinf(one, Vec{0, 0, 0}) == 0.0);

  FeasibilityProblem two(2);
  two.add_relaxed(std::make_shared<CoordinateAffine>(2, std::vector<std::size_t>{0, 1}, Vec{-1, -1}));
  two.add_relaxed(std::make_shared<Hyperslab>(Vec{0, 1}, -kInf, -3.0));
  CHECK(infeasibility_dinf(two, Vec{0, 0}) == 3.0);
  CHECK_THROWS_AS(infeasibility_dinf(two, Vec{0, 0, 0}), DimensionError);
}

TEST_CASE("runs are deterministic") {
  FeasibilityProblem p(3);
  p.add_intrepid(std::make_shared<Hyperplane>(Vec{1, 1, 0}, 0.0), 0.3);
  p.add_intrepid(std::make_shared<Hyperplane>(Vec{0, 1, -1}, 1.0), 0.2);
  p.add_relaxed(std::make_shared<Hyperslab>(Vec{1, 0, 1}, -0.1, 0.1), 1.3);
  auto cfg = config_for(p);
  cfg.control = ControlSchedule::random_blocks(3, 77);
  cfg.trace = TraceDepth::full;
  cfg.tolerance = 1e-9;
  const auto a = run_cycip(p, cfg, Vec{9, -4, 2});
  const auto b = run_cycip(p, cfg, Vec{9, -4, 2});
  CHECK(a.iterations == b.iterations);
  CHECK(a.trace.iterates == b.trace.iterates);
  CHECK(a.trace.indices == b.trace.indices);
}

TEST_CASE("intrepid steps land in their set") {
  FeasibilityProblem p(3);
  p.add_intrepid(std::make_shared<Hyperplane>(Vec{1, 2, 0}, 0.0), 0.3);
  p.add_intrepid(std::make_shared<Hyperplane>(Vec{0, 1, -1}, 1.0), 0.2);
  p.add_intrepid(std::make_shared<Singleton>(Vec{0.1, 0.2, 0.3}), 2.0);
  auto cfg = config_for(p);
  cfg.trace = TraceDepth::full;
  cfg.max_iterations = 3000;
  cfg.tolerance = 1e-300;
  SplitMix64 g(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto r = run_cycip(p, cfg, testing::random_vector(g, 3, -20, 20));
    const auto& it = r.trace.iterates;
    for (std::size_t k = 0; k + 1 < it.size(); ++k)
      if (it[k + 1] != it[k]) CHECK(p.set(r.trace.indices[k]).distance(it[k + 1]) <= 1e-12);
  }
}

TEST_CASE("fejer margin needs a full trace") {
  IterationTrace t;
  t.depth = TraceDepth::summary;
  CHECK_THROWS_AS(fejer_margin(t, Vec{0}), std::invalid_argument);
  t.depth = TraceDepth::full;
  t.iterates = {Vec{1, 2}, Vec{1, 2}, Vec{1, 2}};
  CHECK(fejer_margin(t, Vec{0, 0}) == 0.0);
  t.iterates = {Vec{1, 2}};
  CHECK(fejer_margin(t, Vec{0, 0}) == 0.0);
}

TEST_CASE("summary trace has one record per sweep") {
  const auto p = touching_slabs();
  auto cfg = config_for(p);
  cfg.max_iterations = 10;
  cfg.trace = TraceDepth::summary;
  const auto r = run_cycip(p, cfg, Vec{5, 1});
  REQUIRE(r.trace.sweeps.size() == 6);
  CHECK(r.trace.sweeps[0].k == 0);
  CHECK(r.trace.sweeps[0].index == 0);
  CHECK(r.trace.sweeps[1].k == 2);
  CHECK(r.trace.sweeps[1].index == 2);
  CHECK(r.trace.iterates.empty());
  std::ostringstream csv;
  write_trace_csv(r.trace, csv);
  const std::string text = csv.str();
  CHECK(text.rfind("k,index,step_norm,d2,dinf\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);
}

TEST_CASE("invalid configurations are rejected") {
  const auto p = two_intervals();
  auto cfg = config_for(p);
  cfg.tolerance = 0.0;
  CHECK_THROWS_AS(run_cycip(p, cfg, Vec{5}), std::invalid_argument);
  cfg = config_for(p);
  cfg.max_iterations = 0;
  CHECK_THROWS_AS(run_cycip(p, cfg, Vec{5}), std::invalid_argument);
  cfg = config_for(p);
  cfg.control = ControlSchedule::cyclic(3);
  CHECK_THROWS_AS(run_cycip(p, cfg, Vec{5}), std::invalid_argument);
  cfg = config_for(p);
  CHECK_THROWS_AS(run_cycip(p, cfg, Vec{5, 1}), DimensionError);
  CHECK_THROWS_AS(run_cycip(FeasibilityProblem(1), cfg, Vec{5}), std::invalid_argument);
}

TEST_CASE("metric names") {
  CHECK(to_string(Metric::d2) == "d2");
  CHECK(to_string(Metric::dinf) == "dinf");
  CHECK(parse_metric("d2") == Metric::d2);
  CHECK(parse_metric("dinf") == Metric::dinf);
  CHECK_THROWS_AS(parse_metric("l1"), std::invalid_argument);
  CHECK(to_string(SolveStatus::iteration_limit) == "iteration-limit");
}

TEST_CASE("plain projection variant keeps the sets") {
  const auto p = two_intervals();
  const auto q = p.with_plain_projections();
  REQUIRE(q.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK_FALSE(q.in_enlargement_part(i));
    CHECK(&q.set(i) == &p.set(i));
    CHECK(q.entry(i).label == p.entry(i).label);
  }
  // classical cyclic projections from 5: P_{[0,2]} 5 = 2, then 2 ∈ [1,3]
  auto cfg = config_for(q);
  const auto r = run_cycip(q, cfg, Vec{5});
  CHECK(r.point == Vec{2});
}

TEST_CASE("nonconvex runs are labelled heuristic") {
  FeasibilityProblem p(2);
  p.add_relaxed(std::make_shared<AbsBandFamily>(
      2, std::vector<AbsBand>{{SparseVector::from_dense(Vec{1, 0}), 1.0, 2.0}}));
  CHECK_FALSE(p.is_convex());
  auto cfg = config_for(p);
  const auto r = run_cycip(p, cfg, Vec{0, 0});
  CHECK(r.heuristic);
  CHECK(r.status == SolveStatus::solved);
  CHECK(r.point == Vec{1, 0});
}

}  // TEST_SUITE
