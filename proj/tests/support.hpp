#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "cycip/random.hpp"

namespace testing {

using Vec = std::vector<double>;

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline Vec random_vector(cycip::SplitMix64& g, std::size_t n, double lo, double hi) {
  Vec v(n);
  for (auto& e : v) e = g.uniform(lo, hi);
  return v;
}

/// Nonzero random normal with entries in [-1, 1].
inline Vec random_normal(cycip::SplitMix64& g, std::size_t n) {
  for (;;) {
    Vec a = random_vector(g, n, -1.0, 1.0);
    double s = 0.0;
    for (double v : a) s += v * v;
    if (s > 1e-2) return a;
  }
}

}  // namespace testing
