#include "cycip/road.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "cycip/format.hpp"
#include "cycip/random.hpp"

namespace cycip::road {

namespace {

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
}

}  // namespace

void RoadProblem::validate() const {
  const std::size_t n = t.size();
  if (n < 2) throw InvariantError("road problem needs n >= 2 breakpoints");
  if (!all_finite(t)) throw InvariantError("t must be finite");
  for (std::size_t j = 0; j + 1 < n; ++j)
    if (!(t[j] < t[j + 1]))
      throw InvariantError("t must be strictly increasing (t_" + std::to_string(j + 1) +
                           " >= t_" + std::to_string(j + 2) + ")");
  if (J.size() != y.size()) throw InvariantError("J and y must have the same length");
  std::set<std::size_t> seen;
  for (std::size_t j : J) {
    if (j >= n) throw InvariantError("interpolation index " + std::to_string(j + 1) + " exceeds n");
    if (!seen.insert(j).second)
      throw InvariantError("duplicate interpolation index " + std::to_string(j + 1));
  }
  if (!all_finite(y)) throw InvariantError("y must be finite");
  if (sigma.size() != n - 1) throw InvariantError("sigma must have n-1 entries");
  for (std::size_t j = 0; j < sigma.size(); ++j)
    if (!(sigma[j] > 0.0) || !std::isfinite(sigma[j]))
      throw InvariantError("sigma_" + std::to_string(j + 1) + " must be positive");
  const std::size_t nc = n - 2;
  if (gamma.size() != nc || delta.size() != nc)
    throw InvariantError("gamma and delta must have n-2 entries");
  if (!all_finite(gamma) || !all_finite(delta)) throw InvariantError("gamma/delta must be finite");
  for (std::size_t j = 0; j < nc; ++j)
    if (!(delta[j] <= gamma[j]))
      throw InvariantError("delta_" + std::to_string(j + 1) + " must not exceed gamma_" +
                           std::to_string(j + 1));
  if (sigma_min) {
    if (!(*sigma_min > 0.0) || !std::isfinite(*sigma_min))
      throw InvariantError("sigma_min must be positive");
    if (*sigma_min > *std::min_element(sigma.begin(), sigma.end()))
      throw InvariantError("sigma_min must not exceed min sigma");
  }
}

// --- compilation ------------------------------------------------------------

SparseVector slope_normal(const RoadProblem& p, std::size_t j) {
  const double h = p.t[j + 1] - p.t[j];
  return SparseVector{p.n(), {j, j + 1}, {-1.0 / h, 1.0 / h}};
}

SparseVector curvature_normal(const RoadProblem& p, std::size_t j) {
  const double h0 = p.t[j + 1] - p.t[j];
  const double h1 = p.t[j + 2] - p.t[j + 1];
  return SparseVector{p.n(), {j, j + 1, j + 2}, {1.0 / h0, -1.0 / h1 - 1.0 / h0, 1.0 / h1}};
}

std::shared_ptr<const ConstraintSet> CompiledRoadSets::set(std::size_t i) const {
  if (i == 0) return interpolation;
  return families.at(i - 1);
}

CompiledRoadSets compile_constraints(const RoadProblem& p) {
  p.validate();
  const std::size_t n = p.n();
  CompiledRoadSets out;
  out.interpolation = std::make_shared<const CoordinateAffine>(n, p.J, p.y);

  const std::size_t ns = n - 1;
  const std::size_t nc = n - 2;
  out.slope_family.resize(ns);
  out.curvature_family.resize(nc);

  if (p.sigma_min) {
    std::array<std::vector<AbsBand>, 2> bands;
    for (std::size_t j = 0; j < ns; ++j) {
      out.slope_family[j] = j % 2;
      bands[j % 2].push_back({slope_normal(p, j), *p.sigma_min, p.sigma[j]});
    }
    for (std::size_t g = 0; g < 2; ++g)
      out.families[g] = std::make_shared<const AbsBandFamily>(n, std::move(bands[g]));
  } else {
    std::array<std::vector<Hyperslab>, 2> slabs;
    for (std::size_t j = 0; j < ns; ++j) {
      out.slope_family[j] = j % 2;
      slabs[j % 2].emplace_back(slope_normal(p, j), -p.sigma[j], p.sigma[j]);
    }
    for (std::size_t g = 0; g < 2; ++g)
      out.families[g] = std::make_shared<const SlabFamily>(n, std::move(slabs[g]));
  }

  std::array<std::vector<Hyperslab>, 3> curv;
  for (std::size_t j = 0; j < nc; ++j) {
    out.curvature_family[j] = 2 + j % 3;
    curv[j % 3].emplace_back(curvature_normal(p, j), p.delta[j], p.gamma[j]);
  }
  for (std::size_t g = 0; g < 3; ++g)
    out.families[2 + g] = std::make_shared<const SlabFamily>(n, std::move(curv[g]));
  return out;
}

FeasibilityProblem make_feasibility_problem(const CompiledRoadSets& sets,
                                            OperatorPolicy policy) {
  FeasibilityProblem fp(sets.interpolation->dimension());
  fp.add_relaxed(sets.interpolation, 1.0, "C1");
  for (std::size_t g = 0; g < 5; ++g) {
    const std::string label = "C" + std::to_string(g + 2);
    const auto& set = sets.families[g];
    if (policy == OperatorPolicy::plain_projection) {
      fp.add_relaxed(set, 1.0, label);
    } else if (auto slabs = std::dynamic_pointer_cast<const SlabFamily>(set)) {
      fp.add(std::make_shared<const BlockIntrepidProjector>(slabs), label);
    } else if (auto bands = std::dynamic_pointer_cast<const AbsBandFamily>(set)) {
      fp.add(std::make_shared<const BandIntrepidProjector>(bands), label);
    } else {
      throw std::logic_error("unexpected compiled set type");
    }
  }
  return fp;
}

FeasibilityProblem make_feasibility_problem(const RoadProblem& p, OperatorPolicy policy) {
  return make_feasibility_problem(compile_constraints(p), policy);
}

Vector default_start(const RoadProblem& p) {
  const std::size_t n = p.n();
  Vector x(n, 0.0);
  if (p.J.empty()) return x;
  std::vector<std::size_t> order(p.J.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return p.J[a] < p.J[b]; });
  const std::size_t first = p.J[order.front()];
  const std::size_t last = p.J[order.back()];
  for (std::size_t i = 0; i <= first; ++i) x[i] = p.y[order.front()];
  for (std::size_t i = last; i < n; ++i) x[i] = p.y[order.back()];
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    const std::size_t a = p.J[order[k]], b = p.J[order[k + 1]];
    const double ya = p.y[order[k]], yb = p.y[order[k + 1]];
    for (std::size_t i = a; i <= b; ++i) {
      const double w = (p.t[i] - p.t[a]) / (p.t[b] - p.t[a]);
      x[i] = ya + w * (yb - ya);
    }
    x[b] = yb;
  }
  return x;
}

double project_minslope(double sigma_min, double sigma_j, double s) {
  if (!(sigma_min > 0.0) || !(sigma_min <= sigma_j))
    throw std::invalid_argument("min-slope projection needs 0 < sigma_min <= sigma_j");
  return project_two_sided_band(sigma_min, sigma_j, s);
}

// --- verification -----------------------------------------------------------

std::string to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::interpolation: return "interpolation";
    case ConstraintKind::slope: return "slope";
    case ConstraintKind::curvature_upper: return "curvature_upper";
    case ConstraintKind::curvature_lower: return "curvature_lower";
    case ConstraintKind::min_slope: return "min_slope";
  }
  return "unknown";
}

std::vector<ConstraintCheck> VerificationReport::failures() const {
  std::vector<ConstraintCheck> out;
  for (const auto& c : checks)
    if (c.slack < -tolerance) out.push_back(c);
  return out;
}

VerificationReport verify_feasible(const RoadProblem& p, std::span<const double> x, double tol) {
  p.validate();
  require_dimension(p.n(), x.size());
  VerificationReport r;
  r.tolerance = tol;
  auto add = [&](ConstraintKind kind, std::size_t index, double slack) {
    r.checks.push_back({kind, index, slack});
  };
  for (std::size_t k = 0; k < p.J.size(); ++k)
    add(ConstraintKind::interpolation, p.J[k], -std::abs(x[p.J[k]] - p.y[k]));
  for (std::size_t j = 0; j + 1 < p.n(); ++j) {
    const double s = slope_normal(p, j).dot(x);
    add(ConstraintKind::slope, j, p.sigma[j] - std::abs(s));
    if (p.sigma_min) add(ConstraintKind::min_slope, j, std::abs(s) - *p.sigma_min);
  }
  for (std::size_t j = 0; j + 2 < p.n(); ++j) {
    const double c = curvature_normal(p, j).dot(x);
    add(ConstraintKind::curvature_upper, j, p.gamma[j] - c);
    add(ConstraintKind::curvature_lower, j, c - p.delta[j]);
  }
  for (const auto& c : r.checks) {
    if (c.slack < -tol) r.passed = false;
    if (!r.worst || c.slack < r.worst->slack) r.worst = c;
  }
  return r;
}

double implied_tolerance(const RoadProblem& p, Metric metric, double eps) {
  double scale = 1.0;
  auto widen = [&](const SparseVector& a) {
    const double support = metric == Metric::dinf ? static_cast<double>(a.index.size()) : 1.0;
    scale = std::max(scale, std::sqrt(a.squared_norm() * support));
  };
  for (std::size_t j = 0; j + 1 < p.n(); ++j) widen(slope_normal(p, j));
  for (std::size_t j = 0; j + 2 < p.n(); ++j) widen(curvature_normal(p, j));
  return eps * scale;
}

void write_report_csv(const VerificationReport& r, std::ostream& out) {
  out << "constraint_kind,index,slack\n";
  for (const auto& c : r.checks)
    out << to_string(c.kind) << ',' << c.index + 1 << ',' << format_double(c.slack) << '\n';
}

// --- generation -------------------------------------------------------------

namespace {

void check_params(const GeneratorParams& g) {
  auto fail = [](const std::string& m) { throw GeneratorError("generator parameters: " + m); };
  if (!(g.gap_min > 0.0 && g.gap_min <= g.gap_max)) fail("need 0 < gap_min <= gap_max");
  if (!(g.margin > 0.0)) fail("margin must be > 0");
  if (!(g.sigma_lo > 0.0 && g.sigma_lo <= g.sigma_hi)) fail("need 0 < sigma_lo <= sigma_hi");
  if (!(g.curvature_lo > 2.0 * g.margin && g.curvature_lo <= g.curvature_hi))
    fail("need 2*margin < curvature_lo <= curvature_hi");
  if (!(g.sigma_hi > 3.0 * g.margin)) fail("sigma_hi must exceed 3*margin");
  if (!(g.interpolation_fraction >= 0.0 && g.interpolation_fraction <= 1.0))
    fail("interpolation_fraction must lie in [0, 1]");
  if (g.sigma_min) {
    if (!(*g.sigma_min > 0.0)) fail("sigma_min must be > 0");
    if (!(*g.sigma_min + 3.0 * g.margin < g.sigma_hi)) fail("need sigma_min + 3*margin < sigma_hi");
  }
  if (g.max_retries < 1) fail("max_retries must be >= 1");
}

double min_strict_slack(const VerificationReport& r) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : r.checks)
    if (c.kind != ConstraintKind::interpolation) m = std::min(m, c.slack);
  return m;
}

// Draws in (lo, hi), staying off both ends by a tenth of the width.
double inner_uniform(SplitMix64& rng, double lo, double hi) {
  return lo + (hi - lo) * (0.1 + 0.8 * rng.uniform01());
}

GeneratedProblem draw(std::size_t n, SplitMix64& rng, const GeneratorParams& g) {
  const double m = g.margin;
  const bool convex = !g.sigma_min.has_value();
  const double floor = convex ? 0.0 : *g.sigma_min + m;

  RoadProblem p;
  p.t.resize(n);
  p.t[0] = 0.0;
  for (std::size_t j = 1; j < n; ++j) p.t[j] = p.t[j - 1] + rng.uniform(g.gap_min, g.gap_max);
  p.sigma.resize(n - 1);
  p.gamma.resize(n - 2);
  p.delta.resize(n - 2);
  for (std::size_t j = 0; j + 2 < n; ++j) {
    p.gamma[j] = rng.uniform(g.curvature_lo, g.curvature_hi);
    p.delta[j] = -rng.uniform(g.curvature_lo, g.curvature_hi);
  }
  p.sigma_min = g.sigma_min;

  // Ground-truth slopes in a signed frame u = sign * s. Convex problems use
  // sign = +1 and may cross zero; min-slope problems keep one sign throughout.
  const double sign = convex || rng.uniform01() < 0.5 ? 1.0 : -1.0;
  std::vector<double> u(n - 1);
  p.sigma[0] = rng.uniform(std::max(g.sigma_lo, floor + 2.0 * m), g.sigma_hi);
  u[0] = convex ? inner_uniform(rng, -p.sigma[0] + m, p.sigma[0] - m)
                : inner_uniform(rng, floor, p.sigma[0] - m);
  for (std::size_t j = 0; j + 2 < n; ++j) {
    const double inc_lo = sign > 0 ? p.delta[j] + m : -p.gamma[j] + m;
    const double inc_hi = sign > 0 ? p.gamma[j] - m : -p.delta[j] - m;
    const double cl = u[j] + inc_lo;
    const double cu = u[j] + inc_hi;
    // Smallest |u| the next slope can take; the next bound must clear it.
    const double reach = convex ? (cl > 0.0 ? cl : (cu < 0.0 ? -cu : 0.0)) : std::max(cl, floor);
    const double sig_lo = std::max(g.sigma_lo, reach + 2.0 * m);
    if (sig_lo > g.sigma_hi) throw GeneratorError("slope bound range exhausted");
    p.sigma[j + 1] = rng.uniform(sig_lo, g.sigma_hi);
    const double lo = std::max(cl, convex ? -p.sigma[j + 1] + m : floor);
    const double hi = std::min(cu, p.sigma[j + 1] - m);
    if (!(lo < hi)) throw GeneratorError("empty slope window");
    u[j + 1] = inner_uniform(rng, lo, hi);
  }

  Vector x(n);
  x[0] = g.base_elevation;
  for (std::size_t j = 0; j + 1 < n; ++j) x[j + 1] = x[j] + sign * u[j] * (p.t[j + 1] - p.t[j]);

  for (std::size_t j = 0; j < n; ++j) {
    if (j == 0 || j + 1 == n || rng.uniform01() < g.interpolation_fraction) {
      p.J.push_back(j);
      p.y.push_back(x[j]);
    }
  }
  return {std::move(p), {std::move(x), 0.0}};
}

}  // namespace

GeneratedProblem generate_problem(std::size_t n, std::uint64_t seed, const GeneratorParams& params) {
  if (n < 3) throw GeneratorError("generator needs n >= 3");
  check_params(params);
  SplitMix64 rng(seed);
  for (int attempt = 0; attempt < params.max_retries; ++attempt) {
    GeneratedProblem out;
    try {
      out = draw(n, rng, params);
    } catch (const GeneratorError&) {
      continue;
    }
    out.problem.validate();
    const auto report = verify_feasible(out.problem, out.witness.point, 0.0);
    const double margin = min_strict_slack(report);
    if (report.passed && margin > 0.0) {
      out.witness.margin = margin;
      out.problem.comment = "generated n=" + std::to_string(n) + " seed=" + std::to_string(seed);
      return out;
    }
  }
  throw GeneratorError("no strictly feasible problem after " +
                       std::to_string(params.max_retries) + " attempts");
}

// --- roadfp/1 ---------------------------------------------------------------

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message),
      line_(line),
      detail_(message) {}

namespace {

constexpr const char* kProblemTag = "roadfp/1";
constexpr const char* kWitnessTag = "roadwit/1";

template <typename T>
void write_array(std::ostream& out, const char* key, const std::vector<T>& v) {
  out << key << " = [";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ", ";
    if constexpr (std::is_floating_point_v<T>)
      out << format_double(v[i]);
    else
      out << v[i];
  }
  out << "]\n";
}

struct KeyValueFile {
  std::map<std::string, std::pair<std::string, std::size_t>> fields;  // value, line

  bool has(const std::string& key) const { return fields.count(key) > 0; }

  const std::string& text(const std::string& key) const {
    auto it = fields.find(key);
    if (it == fields.end()) throw ParseError(0, "missing field '" + key + "'");
    return it->second.first;
  }

  std::size_t line(const std::string& key) const { return fields.at(key).second; }

  std::vector<double> reals(const std::string& key) const {
    const std::size_t ln = fields.count(key) ? line(key) : 0;
    std::string_view s = trim(text(key));
    if (s.size() < 2 || s.front() != '[' || s.back() != ']')
      throw ParseError(ln, "field '" + key + "' must be a bracketed array");
    s = trim(s.substr(1, s.size() - 2));
    std::vector<double> out;
    if (s.empty()) return out;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = s.find(',', pos);
      const std::string_view tok = s.substr(pos, comma == std::string_view::npos ? s.npos : comma - pos);
      try {
        out.push_back(parse_double(tok));
      } catch (const std::invalid_argument& e) {
        throw ParseError(ln, "field '" + key + "' entry " + std::to_string(out.size() + 1) + ": " +
                                 e.what());
      }
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    return out;
  }

  double real(const std::string& key) const {
    try {
      return parse_double(text(key));
    } catch (const std::invalid_argument& e) {
      throw ParseError(line(key), "field '" + key + "': " + e.what());
    }
  }
};

KeyValueFile parse_key_values(std::istream& in, const char* tag,
                              const std::set<std::string>& allowed) {
  KeyValueFile f;
  std::string raw;
  std::size_t ln = 0;
  bool tagged = false;
  while (std::getline(in, raw)) {
    ++ln;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!tagged) {
      if (line != tag)
        throw ParseError(ln, "expected version tag '" + std::string(tag) + "', got '" +
                                 std::string(line) + "'");
      tagged = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(ln, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    if (!allowed.count(key)) throw ParseError(ln, "unknown field '" + key + "'");
    if (f.has(key)) throw ParseError(ln, "duplicate field '" + key + "'");
    f.fields[key] = {std::string(trim(line.substr(eq + 1))), ln};
  }
  if (!tagged) throw ParseError(ln, "empty file: missing version tag '" + std::string(tag) + "'");
  return f;
}

std::vector<std::size_t> to_indices(const std::vector<double>& v, std::size_t ln) {
  std::vector<std::size_t> out;
  for (double e : v) {
    if (!(e >= 1.0) || e != std::floor(e))
      throw ParseError(ln, "J entries must be positive integers (1-based)");
    out.push_back(static_cast<std::size_t>(e) - 1);
  }
  return out;
}

}  // namespace

void write_problem(const RoadProblem& p, std::ostream& out) {
  p.validate();
  if (p.comment.find_first_of("\r\n") != std::string::npos)
    throw std::invalid_argument("comment must be a single line");
  out << kProblemTag << '\n';
  if (!p.comment.empty()) out << "comment = " << p.comment << '\n';
  out << "n = " << p.n() << '\n';
  write_array(out, "t", p.t);
  std::vector<std::size_t> one_based(p.J);
  for (auto& j : one_based) ++j;
  write_array(out, "J", one_based);
  write_array(out, "y", p.y);
  write_array(out, "sigma", p.sigma);
  write_array(out, "gamma", p.gamma);
  write_array(out, "delta", p.delta);
  if (p.sigma_min) out << "sigma_min = " << format_double(*p.sigma_min) << '\n';
}

void write_problem(const RoadProblem& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_problem(p, out);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

RoadProblem read_problem(std::istream& in) {
  const KeyValueFile f = parse_key_values(
      in, kProblemTag, {"n", "t", "J", "y", "sigma", "gamma", "delta", "sigma_min", "comment"});
  for (const char* key : {"n", "t", "J", "y", "sigma", "gamma", "delta"})
    if (!f.has(key)) throw ParseError(0, std::string("missing required field '") + key + "'");

  RoadProblem p;
  const double n = f.real("n");
  if (!(n >= 2.0) || n != std::floor(n)) throw ParseError(f.line("n"), "n must be an integer >= 2");
  p.t = f.reals("t");
  if (p.t.size() != static_cast<std::size_t>(n))
    throw ParseError(f.line("t"), "t has " + std::to_string(p.t.size()) + " entries, n = " +
                                      f.text("n"));
  p.J = to_indices(f.reals("J"), f.line("J"));
  p.y = f.reals("y");
  p.sigma = f.reals("sigma");
  p.gamma = f.reals("gamma");
  p.delta = f.reals("delta");
  if (f.has("sigma_min")) p.sigma_min = f.real("sigma_min");
  if (f.has("comment")) p.comment = f.text("comment");
  p.validate();
  return p;
}

RoadProblem read_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return read_problem(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.detail());
  }
}

void write_witness(const FeasibilityWitness& w, std::ostream& out) {
  out << kWitnessTag << '\n';
  out << "margin = " << format_double(w.margin) << '\n';
  write_array(out, "x", w.point);
}

FeasibilityWitness read_witness(std::istream& in) {
  const KeyValueFile f = parse_key_values(in, kWitnessTag, {"margin", "x"});
  return {f.reals("x"), f.real("margin")};
}

}  // namespace cycip::road
