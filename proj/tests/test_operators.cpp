#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>

#include "cycip/operators.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace cycip;
using testing::max_abs_diff;
using testing::Vec;

namespace {

std::shared_ptr<const Hyperplane> plane(Vec a, double b) {
  return std::make_shared<Hyperplane>(a, b);
}

// Three-branch definition evaluated directly for a hyperplane core.
Vec intrepid_reference(const Vec& a, double b, double beta, const Vec& x) {
  const double aa = oracle::dot(a, a);
  const double r = oracle::dot(a, x) - b;
  const double d = std::abs(r) / std::sqrt(aa);
  Vec p = x;
  for (std::size_t i = 0; i < x.size(); ++i) p[i] -= r / aa * a[i];
  if (d >= 2 * beta) return p;
  if (d <= beta) return x;
  Vec q = x;
  for (std::size_t i = 0; i < x.size(); ++i) q[i] += (1 - d / beta) * (x[i] - p[i]);
  return q;
}

}  // namespace

TEST_SUITE("operators") {

TEST_CASE("relaxed projector examples") {
  const double inf = std::numeric_limits<double>::infinity();
  auto half = std::make_shared<Hyperslab>(Vec{1, 0}, -inf, 0.0);
  CHECK(apply_relaxed(RelaxedProjector(half, 1.0), Vec{2, 0}) == half->project(Vec{2, 0}));
  CHECK(apply_relaxed(RelaxedProjector(half, 0.5), Vec{2, 0}) == Vec{1, 0});
  CHECK(apply_relaxed(RelaxedProjector(half, 1.5), Vec{2, 0}) == Vec{-1, 0});
}

TEST_CASE("relaxation outside (0, 2) is rejected") {
  auto s = std::make_shared<Singleton>(Vec{0});
  CHECK_THROWS_AS(RelaxedProjector(s, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(RelaxedProjector(s, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(RelaxedProjector(s, -0.3), std::invalid_argument);
  CHECK_THROWS_AS(RelaxedProjector(s, std::nan("")), std::invalid_argument);
  CHECK_NOTHROW(RelaxedProjector(s, 1.999));
}

TEST_CASE("intrepid projector examples") {
  const IntrepidProjector q(plane({1, 0}, 0.0), 1.0);
  CHECK(apply_intrepid(q, Vec{0.5, 7}) == Vec{0.5, 7});
  CHECK(apply_intrepid(q, Vec{3, 7}) == Vec{0, 7});
  CHECK(apply_intrepid(q, Vec{1.5, 7}) == Vec{0.75, 7});
  CHECK(q.regime(Vec{0.5, 7}) == IntrepidRegime::identity);
  CHECK(q.regime(Vec{1.5, 7}) == IntrepidRegime::reflection);
  CHECK(q.regime(Vec{3, 7}) == IntrepidRegime::projection);
}

TEST_CASE("intrepid seams") {
  const IntrepidProjector q(plane({1, 0}, 0.0), 1.0);
  CHECK(q.regime(Vec{1, 0}) == IntrepidRegime::identity);
  CHECK(q.regime(Vec{2, 0}) == IntrepidRegime::projection);
  CHECK(q.regime(Vec{0, 0}) == IntrepidRegime::identity);
  CHECK(apply_intrepid(q, Vec{1, 5}) == Vec{1, 5});
  CHECK(apply_intrepid(q, Vec{-2, 5}) == Vec{0, 5});
  // the reflection formula agrees with both neighbours at the seams
  SplitMix64 g(3);
  for (int i = 0; i < 1000; ++i) {
    const Vec a = testing::random_normal(g, 3);
    const double b = g.uniform(-1, 1), beta = g.uniform(0.1, 3);
    const double an = std::sqrt(oracle::dot(a, a));
    Vec z = testing::random_vector(g, 3, -2, 2);
    const double t = (b - oracle::dot(a, z)) / (an * an);
    for (std::size_t k = 0; k < 3; ++k) z[k] += t * a[k];
    for (double m : {1.0, 2.0}) {
      Vec x = z;
      for (std::size_t k = 0; k < 3; ++k) x[k] += m * beta * a[k] / an;
      const double f = 1.0 - m;  // reflection factor at d = m·β
      Vec refl = x;
      for (std::size_t k = 0; k < 3; ++k) refl[k] += f * (x[k] - z[k]);
      const Vec branch = m == 1.0 ? x : z;
      CHECK(max_abs_diff(refl, branch) < 1e-12);
    }
  }
  CHECK(intrepid_factor(0.5, 1.0) == 0.0);
  CHECK(intrepid_factor(1.5, 1.0) == -0.5);
  CHECK(intrepid_factor(7.0, 1.0) == -1.0);
}

TEST_CASE("intrepid radius must be positive") {
  CHECK_THROWS_AS(IntrepidProjector(plane({1}, 0.0), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(IntrepidProjector(plane({1}, 0.0), -1.0), std::invalid_argument);
  CHECK_THROWS_AS(IntrepidProjector(nullptr, 1.0), std::invalid_argument);
}

TEST_CASE("intrepid matches the direct definition and lands in the enlargement") {
  SplitMix64 g(7);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t n = 1 + g.bounded(6);
    const Vec a = testing::random_normal(g, n);
    const double b = g.uniform(-1, 1), beta = g.uniform(0.05, 2);
    const IntrepidProjector q(plane(a, b), beta);
    const Vec x = testing::random_vector(g, n, -4, 4);
    const Vec qx = apply_intrepid(q, x);
    CHECK(max_abs_diff(qx, intrepid_reference(a, b, beta, x)) < 1e-12);
    const double dq = std::abs(oracle::dot(a, qx) - b) / std::sqrt(oracle::dot(a, a));
    CHECK(dq <= beta * (1 + 1e-12));
    CHECK(q.target().distance(qx) < 1e-12);
  }
}

TEST_CASE("intrepid is quasi-nonexpansive with a quantified decrease") {
  SplitMix64 g(9);
  int far = 0;
  for (int i = 0; i < 3000; ++i) {
    const std::size_t n = 1 + g.bounded(4);
    auto core = std::make_shared<Singleton>(testing::random_vector(g, n, -1, 1));
    const double beta = g.uniform(0.1, 2), alpha = beta * g.uniform01();
    const IntrepidProjector q(core, beta);
    const Vec x = testing::random_vector(g, n, -5 * beta, 5 * beta);
    Vec u = testing::random_vector(g, n, -1, 1);
    const double un = std::sqrt(oracle::dot(u, u));
    const double r = alpha * g.uniform01() * (1 - 1e-9);
    Vec y = core->point();
    for (std::size_t k = 0; k < n; ++k) y[k] += un > 0 ? r * u[k] / un : 0.0;
    const Vec qx = apply_intrepid(q, x);
    CHECK(oracle::dist(qx, y) <= oracle::dist(x, y) + 1e-9);
    CHECK(decrease_certificate(q, x, y, alpha) >= -1e-9);
    if (core->distance(x) >= 2 * beta) {
      ++far;
      CHECK(oracle::sq(oracle::dist(x, y)) - oracle::sq(oracle::dist(qx, y)) >=
            4 * beta * (beta - alpha) - 1e-9);
    }
  }
  CHECK(far > 100);
}

TEST_CASE("decrease certificate examples and preconditions") {
  const IntrepidProjector q(plane({1, 0}, 0.0), 1.0);
  CHECK(decrease_certificate(q, Vec{3, 7}, Vec{0, 7}, 0.0) == doctest::Approx(3.0));
  CHECK(decrease_certificate(q, Vec{0.5, 2}, Vec{0, 7}, 0.5) == 0.0);
  CHECK_THROWS_AS(decrease_certificate(q, Vec{3, 7}, Vec{0, 7}, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(decrease_certificate(q, Vec{3, 7}, Vec{0, 7}, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(decrease_certificate(q, Vec{3, 7}, Vec{0.8, 7}, 0.5), std::invalid_argument);
}

TEST_CASE("relaxed projector decrease inequality") {
  SplitMix64 g(13);
  for (int i = 0; i < 3000; ++i) {
    const std::size_t n = 1 + g.bounded(4);
    const Vec a = testing::random_normal(g, n);
    const double lo = -g.uniform(0, 1), hi = g.uniform(0, 1);
    auto slab = std::make_shared<Hyperslab>(a, lo, hi);
    const double lambda = g.uniform(0.01, 1.99);
    const RelaxedProjector r(slab, lambda);
    const Vec x = testing::random_vector(g, n, -5, 5);
    Vec c = testing::random_vector(g, n, -5, 5);
    const double t = (g.uniform(lo, hi) - oracle::dot(a, c)) / oracle::dot(a, a);
    for (std::size_t k = 0; k < n; ++k) c[k] += t * a[k];
    const Vec rx = apply_relaxed(r, x);
    const double lhs = oracle::sq(oracle::dist(x, c)) - oracle::sq(oracle::dist(rx, c));
    CHECK(lhs >= (2 - lambda) / lambda * oracle::sq(oracle::dist(x, rx)) - 1e-9);
  }
}

TEST_CASE("block intrepid examples") {
  std::vector<BlockIntrepidProjector::Block> blocks{{Hyperplane(Vec{1, 0}, 0.0), 1.0},
                                                    {Hyperplane(Vec{0, 1}, 0.0), 1.0}};
  const BlockIntrepidProjector b(2, blocks);
  CHECK(apply_block_intrepid(b, Vec{3, 1.5}) == Vec{0, 0.75});
  CHECK(apply_block_intrepid(b, Vec{0.5, -0.25}) == Vec{0.5, -0.25});

  const BlockIntrepidProjector single(2, {{Hyperplane(Vec{1, 2}, 1.0), 0.5}});
  const IntrepidProjector q(plane({1, 2}, 1.0), 0.5);
  SplitMix64 g(17);
  for (int i = 0; i < 500; ++i) {
    const Vec x = testing::random_vector(g, 2, -3, 3);
    CHECK(max_abs_diff(apply_block_intrepid(single, x), apply_intrepid(q, x)) < 1e-15);
  }
}

TEST_CASE("block intrepid rejects overlapping supports") {
  std::vector<BlockIntrepidProjector::Block> blocks{{Hyperplane(Vec{1, 1, 0}, 0.0), 1.0},
                                                    {Hyperplane(Vec{0, 1, 1}, 0.0), 1.0}};
  CHECK_THROWS_AS(BlockIntrepidProjector(3, blocks), std::invalid_argument);
  CHECK_THROWS_AS(BlockIntrepidProjector(3, {{Hyperplane(Vec{1, 0, 0}, 0.0), -1.0}}),
                  std::invalid_argument);
}

TEST_CASE("block order does not matter") {
  SplitMix64 g(19);
  for (int i = 0; i < 1000; ++i) {
    const Hyperplane h1(Vec{g.uniform(-1, 1), g.uniform(0.2, 1), 0, 0}, g.uniform(-1, 1));
    const Hyperplane h2(Vec{0, 0, g.uniform(0.2, 1), g.uniform(-1, 1)}, g.uniform(-1, 1));
    const double b1 = g.uniform(0.1, 1), b2 = g.uniform(0.1, 1);
    const BlockIntrepidProjector forward(4, {{h1, b1}, {h2, b2}});
    const BlockIntrepidProjector backward(4, {{h2, b2}, {h1, b1}});
    const Vec x = testing::random_vector(g, 4, -3, 3);
    CHECK(max_abs_diff(apply_block_intrepid(forward, x), apply_block_intrepid(backward, x)) <=
          1e-15);
    // composition of the single-block operators, either way round
    const IntrepidProjector q1(std::make_shared<Hyperplane>(h1), b1);
    const IntrepidProjector q2(std::make_shared<Hyperplane>(h2), b2);
    CHECK(max_abs_diff(apply_intrepid(q2, apply_intrepid(q1, x)),
                       apply_block_intrepid(forward, x)) <= 1e-14);
    CHECK(max_abs_diff(apply_intrepid(q1, apply_intrepid(q2, x)),
                       apply_block_intrepid(forward, x)) <= 1e-14);
  }
}

TEST_CASE("block steps near a bound end exactly inside the slab") {
  SplitMix64 g(23);
  for (int i = 0; i < 5000; ++i) {
    const Vec a = testing::random_normal(g, 3);
    const double lo = g.uniform(-2, 1), hi = lo + g.uniform(0.05, 2);
    const Hyperslab slab(a, lo, hi);
    const BlockIntrepidProjector q(std::make_shared<SlabFamily>(3, std::vector<Hyperslab>{slab}));
    // a few ulps either side of a bound
    Vec x = slab.project(testing::random_vector(g, 3, -30, 30));
    const std::size_t k = g.bounded(3);
    for (int s = static_cast<int>(g.bounded(9)) - 4; s != 0; s += s > 0 ? -1 : 1)
      x[k] = std::nextafter(x[k], s > 0 ? 1e300 : -1e300);
    const Vec y = apply_block_intrepid(q, x);
    CHECK(slab.contains(y));
    if (slab.contains(x)) CHECK(y == x);
    CHECK(apply_block_intrepid(q, y) == y);
  }
}

TEST_CASE("zero-radius block falls back to projection") {
  const BlockIntrepidProjector b(2, {{Hyperplane(Vec{1, -1}, 0.5), 0.0}});
  const Vec p = apply_block_intrepid(b, Vec{2, 0});
  CHECK(max_abs_diff(p, Vec{1.25, 0.75}) < 1e-15);
}

TEST_CASE("block intrepid from a slab family targets the family") {
  auto fam = std::make_shared<SlabFamily>(
      3, std::vector<Hyperslab>{Hyperslab(Vec{1, 0, 0}, 0, 2), Hyperslab(Vec{0, 1, -1}, -1, 1)});
  const BlockIntrepidProjector b(fam);
  CHECK(b.is_intrepid());
  CHECK(&b.target() == fam.get());
  CHECK(b.blocks().size() == 2);
  CHECK(b.blocks()[0].radius == doctest::Approx(1.0));
  CHECK(b.blocks()[1].radius == doctest::Approx(1.0 / std::sqrt(2.0)));
  // far from the first slab: lands on its midplane x0 = 1
  const Vec x = b.apply(Vec{9, 0.25, 0});
  CHECK(x == Vec{1, 0.25, 0});
}

TEST_CASE("band intrepid picks the nearest branch") {
  auto fam = std::make_shared<AbsBandFamily>(
      2, std::vector<AbsBand>{{SparseVector::from_dense(Vec{1, 0}), 1.0, 3.0}});
  const BandIntrepidProjector q(fam);
  CHECK(q.is_intrepid());
  // branch [1,3] has midplane 2 and radius 1; x0 = -0.5 is nearer the negative branch
  // [-3,-1] (midplane -2, d = 1.5): reflection gives -0.5 + (1 - 1.5)(-0.5 + 2) = -1.25
  const Vec y = q.apply(Vec{-0.5, 4});
  CHECK(max_abs_diff(y, Vec{-1.25, 4}) < 1e-15);
  // tie at 0 goes positive; d = 2 is the projection seam
  CHECK(q.apply(Vec{0, 4}) == Vec{2, 4});
  CHECK(q.apply(Vec{2.5, 4}) == Vec{2.5, 4});
}

}  // TEST_SUITE
