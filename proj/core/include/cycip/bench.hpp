#pragma once

// Algorithm × problem timing grids and performance profiles.
//
// For algorithm a on problem p with solve time τ_{a,p}:
//   r_{a,p} = τ_{a,p} / min_a' τ_{a',p}       (+∞ when a did not solve p)
//   ρ_a(κ)  = card{p : log₂ r_{a,p} ≤ κ} / card P

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "cycip/control.hpp"
#include "cycip/road.hpp"
#include "cycip/solver.hpp"

namespace cycip::bench {

enum class ControlChoice { cyclic, random };

struct AlgorithmSpec {
  std::string name;
  Metric metric;
  ControlChoice control;
  road::OperatorPolicy policy;
};

/// CycIP2, CycIPinf, rCycIP2, rCycIPinf and CycP (classical cyclic
/// projections, stopped on d_inf).
std::vector<AlgorithmSpec> standard_algorithms();
/// Looks a name up among the standard algorithms; throws std::invalid_argument.
AlgorithmSpec find_algorithm(const std::string& name);

struct BenchProblem {
  std::string id;
  FeasibilityProblem problem;  ///< operators for the intrepid policy
  Vector start;
};

BenchProblem make_bench_problem(std::string id, const road::RoadProblem& p);

enum class RunStatus { solved, timeout };
std::string to_string(RunStatus s);

struct RunResult {
  std::string problem_id;
  std::size_t n = 0;
  std::string algorithm;
  RunStatus status = RunStatus::timeout;
  std::uint64_t iterations = 0;
  double time_ms = 0.0;
  double d2_final = 0.0;
  double dinf_final = 0.0;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

struct SuiteOptions {
  std::chrono::duration<double> tau_max{150.0};
  std::uint64_t seed = 0;
  double tolerance = 5e-4;
  std::uint64_t max_iterations = std::numeric_limits<std::uint64_t>::max();
  /// Timed suites run serially on the calling thread. Untimed suites may use
  /// several workers; their time_ms column is then not meaningful.
  bool timed = true;
  unsigned workers = 1;
};

/// Results in problem-major order: results[p * A + a].
/// Only solver execution is timed; operator setup happens before the clock.
std::vector<RunResult> run_suite(const std::vector<BenchProblem>& problems,
                                 const std::vector<AlgorithmSpec>& algorithms,
                                 const SuiteOptions& options);

/// Control seed of cell (p, a), derived from the suite seed.
std::uint64_t cell_seed(std::uint64_t suite_seed, std::size_t problem, std::size_t algorithm);

/// Times below this are treated as this, so a zero time cannot produce 0/0.
inline constexpr double kMinTimeMs = 1e-3;

struct RatioTable {
  std::vector<std::string> algorithms;
  std::vector<std::string> problems;
  /// ratio[a][p]; +∞ for unsolved cells.
  std::vector<std::vector<double>> ratio;
};

/// Throws std::invalid_argument on empty input or an incomplete a × p grid.
RatioTable performance_ratios(const std::vector<RunResult>& results);

struct ProfileCurve {
  std::string algorithm;
  std::vector<double> kappa;
  std::vector<double> rho;
};

std::vector<ProfileCurve> profile_curves(const RatioTable& ratios,
                                         const std::vector<double>& kappa_grid);
ProfileCurve profile_curve(const RatioTable& ratios, std::size_t algorithm,
                           const std::vector<double>& kappa_grid);

/// 0, step, 2·step, … up to the largest finite log₂ ratio (at least one step).
std::vector<double> kappa_grid(const RatioTable& ratios, double step);

void write_results_csv(const std::vector<RunResult>& results, std::ostream& out);
std::vector<RunResult> read_results_csv(std::istream& in);
void write_profile_csv(const std::vector<ProfileCurve>& curves, std::ostream& out);
/// gnuplot data blocks, one per algorithm, separated by two blank lines.
void write_profile_gnuplot(const std::vector<ProfileCurve>& curves, std::ostream& out);

/// Writes results.csv, profile.csv and profile.gp into dir (created if needed).
void export_results(const std::vector<RunResult>& results,
                    const std::vector<ProfileCurve>& curves, const std::string& dir);

}  // namespace cycip::bench
