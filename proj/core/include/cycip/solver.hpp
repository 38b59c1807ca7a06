#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cycip/control.hpp"
#include "cycip/geometry.hpp"
#include "cycip/operators.hpp"

namespace cycip {

/// Indexed family (C_i) with its bound step operators (T_i).
/// Entries whose operator is intrepid form I₀, the rest form I₁.
class FeasibilityProblem {
 public:
  struct Entry {
    std::shared_ptr<const StepOperator> op;
    std::string label;
  };

  explicit FeasibilityProblem(std::size_t dim);

  /// Adds T_i = op; its target becomes C_i.
  std::size_t add(std::shared_ptr<const StepOperator> op, std::string label = {});
  std::size_t add_relaxed(std::shared_ptr<const ConstraintSet> set, double relaxation = 1.0,
                          std::string label = {});
  std::size_t add_intrepid(std::shared_ptr<const ConstraintSet> core, double radius,
                           std::string label = {});

  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  const Entry& entry(std::size_t i) const { return entries_.at(i); }
  const ConstraintSet& set(std::size_t i) const { return entries_.at(i).op->target(); }
  const StepOperator& op(std::size_t i) const { return *entries_.at(i).op; }
  bool in_enlargement_part(std::size_t i) const { return op(i).is_intrepid(); }
  bool is_convex() const;

  /// Same sets, every operator replaced by the plain projector P_{C_i}.
  FeasibilityProblem with_plain_projections() const;

 private:
  std::size_t dim_;
  std::vector<Entry> entries_;
};

enum class Metric { d2, dinf };
enum class TraceDepth { none, summary, full };
enum class SolveStatus { solved, iteration_limit, time_limit };

std::string to_string(Metric m);
std::string to_string(SolveStatus s);
Metric parse_metric(const std::string& text);

struct SolverConfig {
  double tolerance = 5e-4;
  Metric metric = Metric::dinf;
  std::uint64_t max_iterations = 1'000'000;
  std::chrono::duration<double> max_time{150.0};
  ControlSchedule control = ControlSchedule::cyclic(1);
  TraceDepth trace = TraceDepth::none;

  void validate(std::size_t index_count) const;
};

/// One line per sweep of card(I) steps, plus the initial point at k = 0.
struct SweepRecord {
  std::uint64_t k;
  std::size_t index;  ///< 1-based set applied last; 0 for the initial record
  double step_norm;   ///< ‖x_k − x_{k−card(I)}‖₂
  double d2;
  double dinf;
};

struct IterationTrace {
  TraceDepth depth = TraceDepth::none;
  std::vector<SweepRecord> sweeps;
  std::vector<Vector> iterates;          ///< x_0, x_1, … (full depth only)
  std::vector<std::size_t> indices;      ///< i(0), i(1), … (full depth only)
};

struct SolveResult {
  SolveStatus status;
  Vector point;
  std::uint64_t iterations;
  std::chrono::duration<double> wall_time;
  double d2;
  double dinf;
  /// Set when any C_i is nonconvex: no convergence theory backs the run.
  bool heuristic = false;
  IterationTrace trace;
};

double infeasibility_d2(const FeasibilityProblem& p, std::span<const double> x);
double infeasibility_dinf(const FeasibilityProblem& p, std::span<const double> x);

/// x_{k+1} = T_{i(k)} x_k until the chosen measure drops below the tolerance
/// (checked at k = 0 and after every full sweep of card(I) steps) or a limit
/// is reached.
SolveResult run_cycip(const FeasibilityProblem& p, const SolverConfig& cfg,
                      std::span<const double> x0);

/// max_k (‖x_{k+1} − c‖ − ‖x_k − c‖) over a full trace; 0 for fewer than
/// two iterates. Throws std::invalid_argument unless the trace is full.
double fejer_margin(const IterationTrace& trace, std::span<const double> c);

/// CSV with header k,index,step_norm,d2,dinf.
void write_trace_csv(const IterationTrace& trace, std::ostream& out);

}  // namespace cycip
