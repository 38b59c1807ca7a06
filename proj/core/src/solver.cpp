#include "cycip/solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "cycip/format.hpp"

namespace cycip {

FeasibilityProblem::FeasibilityProblem(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw std::invalid_argument("problem dimension must be >= 1");
}

std::size_t FeasibilityProblem::add(std::shared_ptr<const StepOperator> op, std::string label) {
  if (!op) throw std::invalid_argument("null step operator");
  require_dimension(dim_, op->target().dimension());
  if (label.empty()) label = "C" + std::to_string(entries_.size() + 1);
  entries_.push_back({std::move(op), std::move(label)});
  return entries_.size() - 1;
}

std::size_t FeasibilityProblem::add_relaxed(std::shared_ptr<const ConstraintSet> set,
                                            double relaxation, std::string label) {
  return add(std::make_shared<const RelaxedProjector>(std::move(set), relaxation),
             std::move(label));
}

std::size_t FeasibilityProblem::add_intrepid(std::shared_ptr<const ConstraintSet> core,
                                             double radius, std::string label) {
  return add(std::make_shared<const IntrepidProjector>(std::move(core), radius),
             std::move(label));
}

bool FeasibilityProblem::is_convex() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const Entry& e) { return e.op->target().is_convex(); });
}

FeasibilityProblem FeasibilityProblem::with_plain_projections() const {
  FeasibilityProblem out(dim_);
  for (const auto& e : entries_) out.add_relaxed(e.op->target_ptr(), 1.0, e.label);
  return out;
}

std::string to_string(Metric m) { return m == Metric::d2 ? "d2" : "dinf"; }

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::solved: return "solved";
    case SolveStatus::iteration_limit: return "iteration-limit";
    case SolveStatus::time_limit: return "time-limit";
  }
  return "unknown";
}

Metric parse_metric(const std::string& text) {
  if (text == "d2") return Metric::d2;
  if (text == "dinf") return Metric::dinf;
  throw std::invalid_argument("unknown metric '" + text + "' (expected d2 or dinf)");
}

void SolverConfig::validate(std::size_t index_count) const {
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  if (max_iterations == 0) throw std::invalid_argument("iteration limit must be > 0");
  if (!(max_time.count() > 0.0)) throw std::invalid_argument("time limit must be > 0");
  if (control.index_count() != index_count)
    throw std::invalid_argument("control covers " + std::to_string(control.index_count()) +
                                " indices but the problem has " +
                                std::to_string(index_count) + " sets");
}

namespace {

struct Measures {
  double d2;
  double dinf;
};

Measures measure(const FeasibilityProblem& p, std::span<const double> x) {
  double sum = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const ConstraintSet& s = p.set(i);
    const double d = s.distance(x);
    sum += d * d;
    worst = std::max(worst, s.residual_inf(x));
  }
  return {std::sqrt(sum), worst};
}

}  // namespace

double infeasibility_d2(const FeasibilityProblem& p, std::span<const double> x) {
  require_dimension(p.dimension(), x.size());
  return measure(p, x).d2;
}

double infeasibility_dinf(const FeasibilityProblem& p, std::span<const double> x) {
  require_dimension(p.dimension(), x.size());
  return measure(p, x).dinf;
}

SolveResult run_cycip(const FeasibilityProblem& p, const SolverConfig& cfg,
                      std::span<const double> x0) {
  require_dimension(p.dimension(), x0.size());
  if (p.size() == 0) throw std::invalid_argument("problem has no sets");
  cfg.validate(p.size());

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const std::size_t m = p.size();

  SolveResult result{SolveStatus::iteration_limit, Vector(x0.begin(), x0.end()), 0, {}, 0.0,
                     0.0, !p.is_convex(), {}};
  result.trace.depth = cfg.trace;
  Vector& x = result.point;
  Vector previous_sweep;
  const bool tracing = cfg.trace != TraceDepth::none;
  const bool full = cfg.trace == TraceDepth::full;

  auto below = [&](const Measures& ms) {
    return (cfg.metric == Metric::d2 ? ms.d2 : ms.dinf) < cfg.tolerance;
  };
  auto record = [&](std::uint64_t k, std::size_t index, const Measures& ms) {
    if (!tracing) return;
    const double step = previous_sweep.empty() ? 0.0 : distance2(x, previous_sweep);
    result.trace.sweeps.push_back({k, index, step, ms.d2, ms.dinf});
    previous_sweep = x;
  };

  Measures ms = measure(p, x);
  record(0, 0, ms);
  if (full) result.trace.iterates.push_back(x);

  std::uint64_t k = 0;
  ControlCursor cursor(cfg.control);
  bool measured = true;
  if (below(ms)) {
    result.status = SolveStatus::solved;
  } else {
    while (true) {
      if (k >= cfg.max_iterations) {
        result.status = SolveStatus::iteration_limit;
        break;
      }
      const std::size_t i = cursor.next();
      p.op(i).apply_in_place(x);
      ++k;
      measured = false;
      if (full) {
        result.trace.iterates.push_back(x);
        result.trace.indices.push_back(i);
      }
      if (k % m == 0) {
        ms = measure(p, x);
        measured = true;
        record(k, i + 1, ms);
        if (below(ms)) {
          result.status = SolveStatus::solved;
          break;
        }
        if (clock::now() - start >= cfg.max_time) {
          result.status = SolveStatus::time_limit;
          break;
        }
      }
    }
  }
  result.wall_time = clock::now() - start;
  if (!measured) ms = measure(p, x);
  result.iterations = k;
  result.d2 = ms.d2;
  result.dinf = ms.dinf;
  return result;
}

double fejer_margin(const IterationTrace& trace, std::span<const double> c) {
  if (trace.depth != TraceDepth::full)
    throw std::invalid_argument("Fejer margin needs a full trace");
  double margin = 0.0;
  for (std::size_t k = 0; k + 1 < trace.iterates.size(); ++k) {
    const double before = distance2(trace.iterates[k], c);
    const double after = distance2(trace.iterates[k + 1], c);
    margin = k == 0 ? after - before : std::max(margin, after - before);
  }
  return margin;
}

void write_trace_csv(const IterationTrace& trace, std::ostream& out) {
  out << "k,index,step_norm,d2,dinf\n";
  for (const auto& r : trace.sweeps)
    out << r.k << ',' << r.index << ',' << format_double(r.step_norm) << ','
        << format_double(r.d2) << ',' << format_double(r.dinf) << '\n';
}

}  // namespace cycip
