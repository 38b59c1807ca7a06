#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "cycip/geometry.hpp"

namespace cycip {

/// Which branch an intrepid step took.
enum class IntrepidRegime { identity, reflection, projection };

/// A step map T_i bound to its target set C_i.
class StepOperator {
 public:
  virtual ~StepOperator() = default;

  virtual void apply_in_place(std::span<double> x) const = 0;
  /// The set C_i this operator steps towards.
  virtual const ConstraintSet& target() const = 0;
  virtual std::shared_ptr<const ConstraintSet> target_ptr() const = 0;
  /// True for operators onto enlargements (the I₀ tag).
  virtual bool is_intrepid() const = 0;

  Vector apply(std::span<const double> x) const;
};

/// (1 − λ)Id + λP_C with 0 < λ < 2.
class RelaxedProjector final : public StepOperator {
 public:
  RelaxedProjector(std::shared_ptr<const ConstraintSet> set, double relaxation = 1.0);

  void apply_in_place(std::span<double> x) const override;
  const ConstraintSet& target() const override { return *set_; }
  std::shared_ptr<const ConstraintSet> target_ptr() const override { return set_; }
  bool is_intrepid() const override { return false; }

  double relaxation() const { return relaxation_; }

 private:
  std::shared_ptr<const ConstraintSet> set_;
  double relaxation_;
};

/// Intrepid projector onto C = Z_[β] with respect to the core Z and β > 0:
///
///   Qx = P_Z x                          if d_Z(x) ≥ 2β
///        x                              if d_Z(x) ≤ β
///        x + (1 − d_Z(x)/β)(x − P_Z x)  otherwise
///
/// Seams are resolved towards the non-strict inequalities, so d = β is the
/// identity step and d = 2β is the projection step.
class IntrepidProjector final : public StepOperator {
 public:
  IntrepidProjector(std::shared_ptr<const ConstraintSet> core, double radius);

  void apply_in_place(std::span<double> x) const override;
  const ConstraintSet& target() const override { return *target_; }
  std::shared_ptr<const ConstraintSet> target_ptr() const override { return target_; }
  bool is_intrepid() const override { return true; }

  const ConstraintSet& core() const { return *core_; }
  double radius() const { return radius_; }
  IntrepidRegime regime(std::span<const double> x) const;

 private:
  std::shared_ptr<const ConstraintSet> core_;
  double radius_;
  std::shared_ptr<const Enlargement> target_;
};

Vector apply_relaxed(const RelaxedProjector& r, std::span<const double> x);
Vector apply_intrepid(const IntrepidProjector& q, std::span<const double> x);

/// Scalar intrepid factor for a point at distance d from the core:
/// x ↦ x + (1 − clamp(d, β, 2β)/β)(x − P_Z x).
double intrepid_factor(double distance, double radius);

/// Product of intrepid projectors onto hyperplane enlargements whose normals
/// have pairwise disjoint supports. The factors commute, so one pass in any
/// order applies all of them.
///
/// A block with radius 0 (a degenerate slab, lower = upper) has no intrepid
/// projector; it falls back to the plain projection onto its hyperplane, which
/// is the β → 0 limit of the intrepid map.
class BlockIntrepidProjector final : public StepOperator {
 public:
  struct Block {
    Hyperplane core;
    double radius;
  };

  /// Throws std::invalid_argument if the supports overlap.
  BlockIntrepidProjector(std::size_t dim, std::vector<Block> blocks);
  /// Each slab becomes its midplane enlarged by the slab's half-width.
  explicit BlockIntrepidProjector(std::shared_ptr<const SlabFamily> family);

  void apply_in_place(std::span<double> x) const override;
  const ConstraintSet& target() const override { return *target_; }
  std::shared_ptr<const ConstraintSet> target_ptr() const override { return target_; }
  bool is_intrepid() const override { return true; }

  const std::vector<Block>& blocks() const { return blocks_; }

 private:
  std::vector<Block> blocks_;
  std::shared_ptr<const SlabFamily> target_;
};

Vector apply_block_intrepid(const BlockIntrepidProjector& b, std::span<const double> x);

/// Heuristic intrepid step for a nonconvex band family. Per band the branch
/// interval nearest to ⟨a,x⟩ is selected (tie to the positive branch) and
/// the intrepid projector onto that branch's slab is applied.
class BandIntrepidProjector final : public StepOperator {
 public:
  explicit BandIntrepidProjector(std::shared_ptr<const AbsBandFamily> family);

  void apply_in_place(std::span<double> x) const override;
  const ConstraintSet& target() const override { return *family_; }
  std::shared_ptr<const ConstraintSet> target_ptr() const override { return family_; }
  bool is_intrepid() const override { return true; }

 private:
  std::shared_ptr<const AbsBandFamily> family_;
};

/// Slack of ‖x−y‖² − ‖Qx−y‖² − 2(β−α)‖x−Qx‖, which is nonnegative whenever
/// 0 ≤ α ≤ β and d_Z(y) ≤ α.
///
/// Throws std::invalid_argument if α is outside [0, β] or if y is farther
/// than α (plus a relative rounding allowance) from the core.
double decrease_certificate(const IntrepidProjector& q, std::span<const double> x,
                            std::span<const double> y, double alpha);

}  // namespace cycip
