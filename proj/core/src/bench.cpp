#include "cycip/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "cycip/format.hpp"
#include "cycip/random.hpp"

namespace cycip::bench {

std::vector<AlgorithmSpec> standard_algorithms() {
  using road::OperatorPolicy;
  return {
      {"CycIP2", Metric::d2, ControlChoice::cyclic, OperatorPolicy::intrepid},
      {"CycIPinf", Metric::dinf, ControlChoice::cyclic, OperatorPolicy::intrepid},
      {"rCycIP2", Metric::d2, ControlChoice::random, OperatorPolicy::intrepid},
      {"rCycIPinf", Metric::dinf, ControlChoice::random, OperatorPolicy::intrepid},
      {"CycP", Metric::dinf, ControlChoice::cyclic, OperatorPolicy::plain_projection},
  };
}

AlgorithmSpec find_algorithm(const std::string& name) {
  for (auto& a : standard_algorithms())
    if (a.name == name) return a;
  throw std::invalid_argument("unknown algorithm '" + name +
                              "' (expected CycIP2, CycIPinf, rCycIP2, rCycIPinf or CycP)");
}

BenchProblem make_bench_problem(std::string id, const road::RoadProblem& p) {
  return {std::move(id), road::make_feasibility_problem(p), road::default_start(p)};
}

std::string to_string(RunStatus s) { return s == RunStatus::solved ? "solved" : "timeout"; }

std::uint64_t cell_seed(std::uint64_t suite_seed, std::size_t problem, std::size_t algorithm) {
  return derive_seed(derive_seed(suite_seed, problem), algorithm);
}

namespace {

RunResult run_cell(const BenchProblem& bp, const FeasibilityProblem& fp, const AlgorithmSpec& alg,
                   const SuiteOptions& opt, std::uint64_t seed) {
  SolverConfig cfg;
  cfg.tolerance = opt.tolerance;
  cfg.metric = alg.metric;
  cfg.max_iterations = opt.max_iterations;
  cfg.max_time = opt.tau_max;
  cfg.control = alg.control == ControlChoice::cyclic
                    ? ControlSchedule::cyclic(fp.size())
                    : ControlSchedule::random_blocks(fp.size(), seed);
  const SolveResult r = run_cycip(fp, cfg, bp.start);

  RunResult out;
  out.problem_id = bp.id;
  out.n = fp.dimension();
  out.algorithm = alg.name;
  out.iterations = r.iterations;
  out.d2_final = r.d2;
  out.dinf_final = r.dinf;
  const double tau_max_ms = opt.tau_max.count() * 1e3;
  const double ms = r.wall_time.count() * 1e3;
  out.status = r.status == SolveStatus::solved && ms <= tau_max_ms ? RunStatus::solved
                                                                    : RunStatus::timeout;
  out.time_ms = std::min(ms, tau_max_ms);
  return out;
}

}  // namespace

std::vector<RunResult> run_suite(const std::vector<BenchProblem>& problems,
                                 const std::vector<AlgorithmSpec>& algorithms,
                                 const SuiteOptions& options) {
  if (problems.empty() || algorithms.empty())
    throw std::invalid_argument("suite needs at least one problem and one algorithm");
  for (std::size_t a = 0; a < algorithms.size(); ++a)
    for (std::size_t b = a + 1; b < algorithms.size(); ++b)
      if (algorithms[a].name == algorithms[b].name)
        throw std::invalid_argument("duplicate algorithm name '" + algorithms[a].name + "'");

  const std::size_t A = algorithms.size();
  // Setup outside the timed region: plain-projection variants are derived once.
  std::vector<FeasibilityProblem> plain;
  plain.reserve(problems.size());
  for (const auto& bp : problems) plain.push_back(bp.problem.with_plain_projections());

  std::vector<RunResult> results(problems.size() * A);
  auto run = [&](std::size_t cell) {
    const std::size_t p = cell / A, a = cell % A;
    const auto& fp = algorithms[a].policy == road::OperatorPolicy::plain_projection
                         ? plain[p]
                         : problems[p].problem;
    results[cell] = run_cell(problems[p], fp, algorithms[a], options, cell_seed(options.seed, p, a));
  };

  const unsigned workers = options.timed ? 1u : std::max(1u, options.workers);
  if (workers == 1) {
    for (std::size_t cell = 0; cell < results.size(); ++cell) run(cell);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t cell; (cell = next++) < results.size();) {
        try {
          run(cell);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

// --- ratios and profiles ----------------------------------------------------

RatioTable performance_ratios(const std::vector<RunResult>& results) {
  if (results.empty()) throw std::invalid_argument("no results to rank");
  RatioTable t;
  std::map<std::string, std::size_t> alg_index, prob_index;
  for (const auto& r : results) {
    if (alg_index.emplace(r.algorithm, t.algorithms.size()).second) t.algorithms.push_back(r.algorithm);
    if (prob_index.emplace(r.problem_id, t.problems.size()).second) t.problems.push_back(r.problem_id);
  }
  const double inf = std::numeric_limits<double>::infinity();
  const double unset = -1.0;
  std::vector<std::vector<double>> tau(t.algorithms.size(),
                                       std::vector<double>(t.problems.size(), unset));
  for (const auto& r : results) {
    double& cell = tau[alg_index[r.algorithm]][prob_index[r.problem_id]];
    if (cell != unset)
      throw std::invalid_argument("duplicate result for " + r.algorithm + " on " + r.problem_id);
    cell = r.status == RunStatus::solved ? std::max(r.time_ms, kMinTimeMs) : inf;
  }
  t.ratio = tau;
  for (std::size_t p = 0; p < t.problems.size(); ++p) {
    double best = inf;
    for (std::size_t a = 0; a < t.algorithms.size(); ++a) {
      if (tau[a][p] == unset)
        throw std::invalid_argument("missing result for " + t.algorithms[a] + " on " + t.problems[p]);
      best = std::min(best, tau[a][p]);
    }
    for (std::size_t a = 0; a < t.algorithms.size(); ++a)
      t.ratio[a][p] = tau[a][p] == inf ? inf : tau[a][p] / best;
  }
  return t;
}

ProfileCurve profile_curve(const RatioTable& ratios, std::size_t algorithm,
                           const std::vector<double>& kappa_grid) {
  ProfileCurve c{ratios.algorithms.at(algorithm), kappa_grid, {}};
  const auto& row = ratios.ratio.at(algorithm);
  const double count = static_cast<double>(row.size());
  for (double kappa : kappa_grid) {
    std::size_t hits = 0;
    for (double r : row)
      if (std::isfinite(r) && std::log2(r) <= kappa) ++hits;
    c.rho.push_back(count > 0 ? static_cast<double>(hits) / count : 0.0);
  }
  return c;
}

std::vector<ProfileCurve> profile_curves(const RatioTable& ratios,
                                         const std::vector<double>& kappa_grid) {
  std::vector<ProfileCurve> out;
  for (std::size_t a = 0; a < ratios.algorithms.size(); ++a)
    out.push_back(profile_curve(ratios, a, kappa_grid));
  return out;
}

std::vector<double> kappa_grid(const RatioTable& ratios, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("kappa step must be > 0");
  double top = 0.0;
  for (const auto& row : ratios.ratio)
    for (double r : row)
      if (std::isfinite(r)) top = std::max(top, std::log2(r));
  const auto steps = static_cast<std::size_t>(std::ceil(top / step)) + 1;
  std::vector<double> grid;
  for (std::size_t i = 0; i <= steps; ++i) grid.push_back(static_cast<double>(i) * step);
  return grid;
}

// --- files ------------------------------------------------------------------

void write_results_csv(const std::vector<RunResult>& results, std::ostream& out) {
  out << "problem_id,n,algorithm,status,iterations,time_ms,d2_final,dinf_final\n";
  for (const auto& r : results)
    out << r.problem_id << ',' << r.n << ',' << r.algorithm << ',' << to_string(r.status) << ','
        << r.iterations << ',' << format_double(r.time_ms) << ',' << format_double(r.d2_final)
        << ',' << format_double(r.dinf_final) << '\n';
}

std::vector<RunResult> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      trim(line) != "problem_id,n,algorithm,status,iterations,time_ms,d2_final,dinf_final")
    throw std::invalid_argument("results.csv: unexpected header");
  std::vector<RunResult> out;
  std::size_t ln = 1;
  while (std::getline(in, line)) {
    ++ln;
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(std::string(trim(line)));
    for (std::string tok; std::getline(ss, tok, ',');) f.push_back(tok);
    if (f.size() != 8)
      throw std::invalid_argument("results.csv line " + std::to_string(ln) + ": expected 8 fields");
    try {
      RunResult r;
      r.problem_id = f[0];
      r.n = std::stoull(f[1]);
      r.algorithm = f[2];
      if (f[3] == "solved")
        r.status = RunStatus::solved;
      else if (f[3] == "timeout")
        r.status = RunStatus::timeout;
      else
        throw std::invalid_argument("bad status '" + f[3] + "'");
      r.iterations = std::stoull(f[4]);
      r.time_ms = parse_double(f[5]);
      r.d2_final = parse_double(f[6]);
      r.dinf_final = parse_double(f[7]);
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::invalid_argument("results.csv line " + std::to_string(ln) + ": " + e.what());
    }
  }
  return out;
}

void write_profile_csv(const std::vector<ProfileCurve>& curves, std::ostream& out) {
  out << "algorithm,kappa,rho\n";
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.kappa.size(); ++i)
      out << c.algorithm << ',' << format_double(c.kappa[i]) << ',' << format_double(c.rho[i])
          << '\n';
}

void write_profile_gnuplot(const std::vector<ProfileCurve>& curves, std::ostream& out) {
  out << "# performance profiles; plot with\n"
      << "#   plot for [i=0:" << (curves.empty() ? 0 : curves.size() - 1)
      << "] 'profile.gp' index i using 1:2 with steps title columnheader(2)\n";
  for (std::size_t b = 0; b < curves.size(); ++b) {
    const auto& c = curves[b];
    if (b) out << "\n\n";
    out << "\"kappa\" \"" << c.algorithm << "\"\n";
    for (std::size_t i = 0; i < c.kappa.size(); ++i)
      out << format_double(c.kappa[i]) << ' ' << format_double(c.rho[i]) << '\n';
  }
}

void export_results(const std::vector<RunResult>& results, const std::vector<ProfileCurve>& curves,
                    const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    return f;
  };
  {
    auto f = open("results.csv");
    write_results_csv(results, f);
  }
  {
    auto f = open("profile.csv");
    write_profile_csv(curves, f);
  }
  {
    auto f = open("profile.gp");
    write_profile_gnuplot(curves, f);
  }
}

}  // namespace cycip::bench
