#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "cycip/bench.hpp"
#include "cycip/format.hpp"
#include "cycip/random.hpp"
#include "cycip/road.hpp"
#include "cycip/solver.hpp"

namespace cycip::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GenOptions {
  std::size_t n = 0;
  std::optional<std::size_t> n_max;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  bool nonconvex = false;
  std::optional<double> min_slope;
  std::string out;
};

struct SolveOptions {
  std::string problem;
  std::string metric = "dinf";
  double eps = 5e-4;
  std::string control = "cyclic";
  std::uint64_t seed = 0;
  double max_time = 150.0;
  std::uint64_t max_iters = 1'000'000;
  std::string trace;
  std::string policy = "intrepid";
  std::string point_out;
};

struct BenchOptions {
  std::string problems;
  std::string algs = "CycIP2,CycIPinf,rCycIP2,rCycIPinf,CycP";
  double tau_max = 150.0;
  std::uint64_t seed = 0;
  double eps = 5e-4;
  std::string out;
};

struct ProfileOptions {
  std::string results;
  std::string out;
  double kappa_step = 0.01;
};

void write_metadata(const fs::path& dir, const json& meta) {
  std::ofstream f(dir / "metadata.json", std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (dir / "metadata.json").string());
  f << meta.dump(2) << '\n';
}

std::string zero_pad(std::size_t k, std::size_t width) {
  std::ostringstream s;
  s << std::setw(static_cast<int>(width)) << std::setfill('0') << k;
  return s.str();
}

int run_gen(const GenOptions& o, std::ostream& out) {
  if (o.n < 3) throw CLI::ValidationError("--n", "must be >= 3");
  if (o.n_max && *o.n_max < o.n) throw CLI::ValidationError("--n-max", "must be >= --n");
  road::GeneratorParams params;
  if (o.nonconvex) params.sigma_min = *o.min_slope;

  const fs::path dir(o.out);
  fs::create_directories(dir);
  const std::size_t width = std::max<std::size_t>(3, std::to_string(o.count).size());
  SplitMix64 sizes(derive_seed(o.seed, UINT64_MAX - 1));
  for (std::size_t k = 0; k < o.count; ++k) {
    const std::size_t n = o.n_max ? o.n + sizes.bounded(*o.n_max - o.n + 1) : o.n;
    auto g = road::generate_problem(n, derive_seed(o.seed, k), params);
    const std::string stem = "road_" + zero_pad(k, width);
    road::write_problem(g.problem, (dir / (stem + ".roadfp")).string());
    std::ofstream w(dir / (stem + ".witness"), std::ios::binary);
    road::write_witness(g.witness, w);
    out << stem << " n=" << n << " margin=" << format_double(g.witness.margin) << '\n';
  }
  json meta = {{"command", "gen"},
               {"n", o.n},
               {"count", o.count},
               {"seed", o.seed},
               {"nonconvex", o.nonconvex},
               {"out", o.out}};
  if (o.n_max) meta["n_max"] = *o.n_max;
  if (o.min_slope) meta["min_slope"] = *o.min_slope;
  write_metadata(dir, meta);
  return kExitOk;
}

int run_solve(const SolveOptions& o, std::ostream& out) {
  const road::RoadProblem problem = road::read_problem(o.problem);
  const auto policy = o.policy == "plain" ? road::OperatorPolicy::plain_projection
                                          : road::OperatorPolicy::intrepid;
  const FeasibilityProblem fp = road::make_feasibility_problem(problem, policy);

  SolverConfig cfg;
  cfg.tolerance = o.eps;
  cfg.metric = parse_metric(o.metric);
  cfg.max_iterations = o.max_iters;
  cfg.max_time = std::chrono::duration<double>(o.max_time);
  cfg.control = o.control == "random" ? ControlSchedule::random_blocks(fp.size(), o.seed)
                                      : ControlSchedule::cyclic(fp.size());
  cfg.trace = o.trace.empty() ? TraceDepth::none : TraceDepth::summary;

  const SolveResult r = run_cycip(fp, cfg, road::default_start(problem));
  const double tol = road::implied_tolerance(problem, cfg.metric, o.eps);
  const auto report = road::verify_feasible(problem, r.point, tol);

  out << "problem: " << o.problem << '\n'
      << "n: " << problem.n() << '\n'
      << "metric: " << o.metric << '\n'
      << "eps: " << format_double(o.eps) << '\n'
      << "control: " << o.control << '\n'
      << "seed: " << o.seed << '\n'
      << "policy: " << o.policy << '\n'
      << "max_time_s: " << format_double(o.max_time) << '\n'
      << "max_iters: " << o.max_iters << '\n'
      << "status: " << to_string(r.status) << '\n'
      << "iterations: " << r.iterations << '\n'
      << "time_ms: " << format_double(r.wall_time.count() * 1e3) << '\n'
      << "d2: " << format_double(r.d2) << '\n'
      << "dinf: " << format_double(r.dinf) << '\n'
      << "heuristic: " << (r.heuristic ? "yes" : "no") << '\n'
      << "verified: " << (report.passed ? "yes" : "no") << " (tol " << format_double(tol) << ")\n";

  if (!o.trace.empty()) {
    std::ofstream f(o.trace, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write trace '" + o.trace + "'");
    write_trace_csv(r.trace, f);
  }
  if (!o.point_out.empty()) {
    std::ofstream f(o.point_out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + o.point_out + "'");
    for (double v : r.point) f << format_double(v) << '\n';
  }
  return r.status == SolveStatus::solved ? kExitOk : kExitNotSolved;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');)
    if (!trim(tok).empty()) out.emplace_back(trim(tok));
  return out;
}

int run_bench(const BenchOptions& o, std::ostream& out) {
  std::vector<bench::AlgorithmSpec> algorithms;
  for (const auto& name : split_list(o.algs)) algorithms.push_back(bench::find_algorithm(name));
  if (algorithms.empty()) throw CLI::ValidationError("--algs", "no algorithms given");

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(o.problems))
    if (entry.is_regular_file() && entry.path().extension() == ".roadfp")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no .roadfp files in '" + o.problems + "'");

  std::vector<bench::BenchProblem> problems;
  for (const auto& f : files)
    problems.push_back(bench::make_bench_problem(f.stem().string(), road::read_problem(f.string())));

  bench::SuiteOptions opts;
  opts.tau_max = std::chrono::duration<double>(o.tau_max);
  opts.seed = o.seed;
  opts.tolerance = o.eps;
  const auto results = bench::run_suite(problems, algorithms, opts);

  const fs::path dir(o.out);
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "results.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write results.csv");
    bench::write_results_csv(results, f);
  }
  std::size_t solved = 0;
  for (const auto& r : results) solved += r.status == bench::RunStatus::solved;
  out << "runs: " << results.size() << " solved: " << solved << '\n';
  write_metadata(dir, {{"command", "bench"},
                       {"problems", o.problems},
                       {"algs", split_list(o.algs)},
                       {"tau_max_s", o.tau_max},
                       {"seed", o.seed},
                       {"eps", o.eps},
                       {"out", o.out}});
  return kExitOk;
}

int run_profile(const ProfileOptions& o, std::ostream& out) {
  std::ifstream in(o.results, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + o.results + "'");
  const auto results = bench::read_results_csv(in);
  const auto ratios = bench::performance_ratios(results);
  const auto curves = bench::profile_curves(ratios, bench::kappa_grid(ratios, o.kappa_step));

  const fs::path dir(o.out);
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "profile.csv", std::ios::binary);
    bench::write_profile_csv(curves, f);
  }
  {
    std::ofstream f(dir / "profile.gp", std::ios::binary);
    bench::write_profile_gnuplot(curves, f);
  }
  for (const auto& c : curves)
    out << c.algorithm << ": rho(0)=" << format_double(c.rho.front())
        << " rho(max)=" << format_double(c.rho.back()) << '\n';
  write_metadata(dir, {{"command", "profile"},
                       {"results", o.results},
                       {"kappa_step", o.kappa_step},
                       {"out", o.out}});
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cyclic intrepid projections for road vertical-alignment feasibility"};
  app.name("cycip");
  app.require_subcommand(1);

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Generate strictly feasible road problems");
  g->add_option("--n", gen.n, "Number of breakpoints (minimum when --n-max is given)")->required();
  g->add_option("--n-max", gen.n_max, "Draw n uniformly from [--n, --n-max] per problem");
  g->add_option("--count", gen.count, "Number of problems")->check(CLI::PositiveNumber);
  g->add_option("--seed", gen.seed, "Random seed");
  auto* nonconvex = g->add_flag("--nonconvex", gen.nonconvex, "Add a minimum-slope constraint");
  auto* min_slope = g->add_option("--min-slope", gen.min_slope, "Minimum |slope|")
                        ->check(CLI::PositiveNumber);
  nonconvex->needs(min_slope);
  min_slope->needs(nonconvex);
  g->add_option("--out", gen.out, "Output directory")->required();

  SolveOptions solve;
  auto* s = app.add_subcommand("solve", "Solve one roadfp/1 problem");
  s->add_option("--problem", solve.problem, "roadfp/1 file")->required()->check(CLI::ExistingFile);
  s->add_option("--metric", solve.metric, "Stopping measure")->check(CLI::IsMember({"d2", "dinf"}));
  s->add_option("--eps", solve.eps, "Stopping tolerance")->check(CLI::PositiveNumber);
  s->add_option("--control", solve.control, "Index control")
      ->check(CLI::IsMember({"cyclic", "random"}));
  s->add_option("--seed", solve.seed, "Seed for the random control");
  s->add_option("--max-time", solve.max_time, "Wall-clock limit in seconds")
      ->check(CLI::PositiveNumber);
  s->add_option("--max-iters", solve.max_iters, "Iteration limit")->check(CLI::PositiveNumber);
  s->add_option("--trace", solve.trace, "Write the per-sweep trace CSV here");
  s->add_option("--policy", solve.policy, "Step operators for C2..C6")
      ->check(CLI::IsMember({"intrepid", "plain"}));
  s->add_option("--point-out", solve.point_out, "Write the final point, one value per line");

  BenchOptions bo;
  auto* b = app.add_subcommand("bench", "Run an algorithm x problem timing grid");
  b->add_option("--problems", bo.problems, "Directory of .roadfp files")
      ->required()
      ->check(CLI::ExistingDirectory);
  b->add_option("--algs", bo.algs, "Comma-separated algorithm names");
  b->add_option("--tau-max", bo.tau_max, "Per-run time budget in seconds")
      ->check(CLI::PositiveNumber);
  b->add_option("--seed", bo.seed, "Suite seed");
  b->add_option("--eps", bo.eps, "Stopping tolerance")->check(CLI::PositiveNumber);
  b->add_option("--out", bo.out, "Output directory")->required();

  ProfileOptions po;
  auto* p = app.add_subcommand("profile", "Performance profiles from results.csv");
  p->add_option("--results", po.results, "results.csv")->required()->check(CLI::ExistingFile);
  p->add_option("--out", po.out, "Output directory")->required();
  p->add_option("--kappa-step", po.kappa_step, "Spacing of the kappa grid")
      ->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (g->parsed()) return run_gen(gen, out);
    if (s->parsed()) return run_solve(solve, out);
    if (b->parsed()) return run_bench(bo, out);
    if (p->parsed()) return run_profile(po, out);
  } catch (const CLI::Error& e) {
    err << "cycip: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "cycip: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace cycip::cli
