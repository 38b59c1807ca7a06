#pragma once

// Vertical alignment of a road profile as a six-set feasibility problem.
//
// Unknowns are elevations x_1..x_n at stations t_1 < … < t_n. Constraints:
//   interpolation  x_j = y_j, j ∈ J
//   slope          |s_j| ≤ σ_j,             s_j = (x_{j+1} − x_j)/(t_{j+1} − t_j)
//   curvature      δ_j ≤ s_{j+1} − s_j ≤ γ_j
//   min slope      |s_j| ≥ σ_min            (optional, nonconvex)
//
// All indices in this header are 0-based; files and reports use 1-based.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cycip/geometry.hpp"
#include "cycip/solver.hpp"

namespace cycip::road {

struct RoadProblem {
  std::vector<double> t;
  std::vector<std::size_t> J;
  std::vector<double> y;
  std::vector<double> sigma;
  std::vector<double> gamma;
  std::vector<double> delta;
  std::optional<double> sigma_min;
  std::string comment;

  std::size_t n() const { return t.size(); }
  bool is_convex() const { return !sigma_min.has_value(); }

  /// Throws InvariantError naming the first violated invariant.
  void validate() const;

  friend bool operator==(const RoadProblem&, const RoadProblem&) = default;
};

class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The six sets. Slope j goes to C₂ for even j and C₃ for odd j; curvature
/// j goes to C₄, C₅, C₆ for j mod 3 = 0, 1, 2 (0-based j). In the nonconvex
/// variant C₂ and C₃ are band families instead of slab families.
struct CompiledRoadSets {
  std::shared_ptr<const CoordinateAffine> interpolation;
  std::array<std::shared_ptr<const ConstraintSet>, 5> families;
  std::vector<std::size_t> slope_family;      ///< family index (0 → C₂, 1 → C₃) per slope j
  std::vector<std::size_t> curvature_family;  ///< family index (2,3,4 → C₄,C₅,C₆) per curvature j

  std::shared_ptr<const ConstraintSet> set(std::size_t i) const;  ///< i = 0..5
};

CompiledRoadSets compile_constraints(const RoadProblem& p);

/// Normal of slope j: ⟨a,x⟩ = s_j.
SparseVector slope_normal(const RoadProblem& p, std::size_t j);
/// Normal of curvature j: ⟨a,x⟩ = s_{j+1} − s_j.
SparseVector curvature_normal(const RoadProblem& p, std::size_t j);

enum class OperatorPolicy { intrepid, plain_projection };

/// T₁ = P_{C₁}; T₂..T₆ block intrepid (or plain projections).
FeasibilityProblem make_feasibility_problem(const CompiledRoadSets& sets,
                                            OperatorPolicy policy = OperatorPolicy::intrepid);
FeasibilityProblem make_feasibility_problem(const RoadProblem& p,
                                            OperatorPolicy policy = OperatorPolicy::intrepid);

/// Piecewise-linear interpolation of (t_J, y), constant outside the first and
/// last interpolation station; zeros when J is empty.
Vector default_start(const RoadProblem& p);

/// Nearest point of [−σ_j, −σ_min] ∪ [σ_min, σ_j] to s; s = 0 maps to +σ_min.
double project_minslope(double sigma_min, double sigma_j, double s);

// --- verification -------------------------------------------------------

enum class ConstraintKind { interpolation, slope, curvature_upper, curvature_lower, min_slope };
std::string to_string(ConstraintKind k);

struct ConstraintCheck {
  ConstraintKind kind;
  std::size_t index;  ///< 0-based
  double slack;       ///< ≥ 0 when satisfied, −violation otherwise
};

struct VerificationReport {
  bool passed = true;
  double tolerance = 0.0;
  std::vector<ConstraintCheck> checks;
  std::optional<ConstraintCheck> worst;  ///< smallest slack

  /// Failing checks only.
  std::vector<ConstraintCheck> failures() const;
};

/// Interpolation checks use slack = −|x_j − y_j|, so they pass iff the gap is
/// at most tol; inequality slacks are measured in slope units.
VerificationReport verify_feasible(const RoadProblem& p, std::span<const double> x,
                                   double tol);

/// Verifier tolerance implied by stopping at metric < eps: a per-set residual
/// r bounds the violation of ⟨a,x⟩ ∈ [l,u] by ‖a‖‖r‖₂, and ‖r‖₂ ≤ √|supp a|·‖r‖∞.
double implied_tolerance(const RoadProblem& p, Metric metric, double eps);

/// CSV with header constraint_kind,index,slack (index 1-based).
void write_report_csv(const VerificationReport& r, std::ostream& out);

// --- generation ---------------------------------------------------------

struct GeneratorParams {
  double gap_min = 10.0;  ///< station spacing range
  double gap_max = 40.0;
  double sigma_lo = 0.04;  ///< slope bound range
  double sigma_hi = 0.10;
  double curvature_lo = 0.004;  ///< γ_j and −δ_j drawn from this range
  double curvature_hi = 0.02;
  double margin = 5e-4;  ///< strict slack kept by the ground-truth profile
  double interpolation_fraction = 0.05;
  double base_elevation = 100.0;
  std::optional<double> sigma_min;  ///< nonconvex variant when set
  int max_retries = 100;
};

struct FeasibilityWitness {
  Vector point;
  double margin;  ///< smallest slack over all strict inequalities
};

struct GeneratedProblem {
  RoadProblem problem;
  FeasibilityWitness witness;
};

class GeneratorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

GeneratedProblem generate_problem(std::size_t n, std::uint64_t seed,
                                  const GeneratorParams& params = {});

// --- roadfp/1 files -----------------------------------------------------

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message);
  /// 0 when the problem is not tied to one line (e.g. a missing field).
  std::size_t line() const { return line_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

void write_problem(const RoadProblem& p, std::ostream& out);
void write_problem(const RoadProblem& p, const std::string& path);
RoadProblem read_problem(std::istream& in);
RoadProblem read_problem(const std::string& path);

/// roadwit/1: the witness point and its margin.
void write_witness(const FeasibilityWitness& w, std::ostream& out);
FeasibilityWitness read_witness(std::istream& in);

}  // namespace cycip::road
