#pragma once

// Closed sets with closed-form projections: the primitives every step
// operator is built from.

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cycip {

using Vector = std::vector<double>;

class DimensionError : public std::invalid_argument {
 public:
  DimensionError(std::size_t expected, std::size_t actual);
};

void require_dimension(std::size_t expected, std::size_t actual);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double norm_inf(std::span<const double> v);
double distance2(std::span<const double> a, std::span<const double> b);
double distance_inf(std::span<const double> a, std::span<const double> b);

/// Normal vector stored by its nonzero entries, in increasing index order.
struct SparseVector {
  std::size_t dim = 0;
  std::vector<std::size_t> index;
  std::vector<double> value;

  static SparseVector from_dense(std::span<const double> dense);

  double dot(std::span<const double> x) const;
  double squared_norm() const;
  /// x += scale * this
  void axpy(double scale, std::span<double> x) const;
  Vector to_dense() const;
};

/// Base of every closed set in the library.
///
/// `project_in_place` is the hot path used by the solver and skips the
/// dimension check; the non-virtual wrappers check it.
class ConstraintSet {
 public:
  virtual ~ConstraintSet() = default;

  virtual std::size_t dimension() const = 0;
  virtual void project_in_place(std::span<double> x) const = 0;
  /// Exact membership test, no tolerance.
  virtual bool contains(std::span<const double> x) const;
  virtual bool is_convex() const { return true; }
  virtual std::string describe() const = 0;

  Vector project(std::span<const double> x) const;
  /// Euclidean distance ‖x − P(x)‖₂.
  double distance(std::span<const double> x) const;
  /// Max-norm of the projection residual ‖x − P(x)‖∞.
  double residual_inf(std::span<const double> x) const;

 protected:
  /// Both default to forming P(x). Sets with a closed form override them so
  /// that the result is positive exactly when contains(x) is false, even
  /// where x − P(x) would cancel to zero in floating point.
  virtual double distance_unchecked(std::span<const double> x) const;
  virtual double residual_inf_unchecked(std::span<const double> x) const;
};

/// {p}
class Singleton final : public ConstraintSet {
 public:
  explicit Singleton(Vector point);

  std::size_t dimension() const override { return point_.size(); }
  void project_in_place(std::span<double> x) const override;
  bool contains(std::span<const double> x) const override;
  std::string describe() const override { return "singleton"; }

  const Vector& point() const { return point_; }

 private:
  Vector point_;
};

/// {x : ⟨a,x⟩ = offset}
class Hyperplane final : public ConstraintSet {
 public:
  Hyperplane(std::span<const double> normal, double offset);
  Hyperplane(SparseVector normal, double offset);

  std::size_t dimension() const override { return normal_.dim; }
  void project_in_place(std::span<double> x) const override;
  bool contains(std::span<const double> x) const override;
  std::string describe() const override { return "hyperplane"; }

  const SparseVector& normal() const { return normal_; }
  double offset() const { return offset_; }
  double normal_norm() const { return normal_norm_; }
  /// Signed distance (⟨a,x⟩ − offset)/‖a‖.
  double signed_distance(std::span<const double> x) const;


 protected:
  double distance_unchecked(std::span<const double> x) const override;
  double residual_inf_unchecked(std::span<const double> x) const override;
 private:
  SparseVector normal_;
  double offset_;
  double normal_sq_;
  double normal_norm_;
};

/// {x : lower ≤ ⟨a,x⟩ ≤ upper}. An infinite bound gives a halfspace.
class Hyperslab final : public ConstraintSet {
 public:
  Hyperslab(std::span<const double> normal, double lower, double upper);
  Hyperslab(SparseVector normal, double lower, double upper);

  std::size_t dimension() const override { return normal_.dim; }
  void project_in_place(std::span<double> x) const override;
  bool contains(std::span<const double> x) const override;
  std::string describe() const override { return "hyperslab"; }

  const SparseVector& normal() const { return normal_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double squared_normal_norm() const { return normal_sq_; }
  bool bounded() const;

  /// Enlargement view: the slab is midplane()_[radius()].
  /// Only defined for finite bounds.
  Hyperplane midplane() const;
  double radius() const;


 protected:
  double distance_unchecked(std::span<const double> x) const override;
  double residual_inf_unchecked(std::span<const double> x) const override;
 private:
  SparseVector normal_;
  double lower_;
  double upper_;
  double normal_sq_;
};

/// {x : x_j = y_j for j ∈ J}; indices are 0-based.
class CoordinateAffine final : public ConstraintSet {
 public:
  CoordinateAffine(std::size_t dim, std::vector<std::size_t> indices,
                   std::vector<double> values);

  std::size_t dimension() const override { return dim_; }
  void project_in_place(std::span<double> x) const override;
  bool contains(std::span<const double> x) const override;
  std::string describe() const override { return "coordinate-affine"; }

  const std::vector<std::size_t>& indices() const { return indices_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t dim_;
  std::vector<std::size_t> indices_;
  std::vector<double> values_;
};

/// True iff the nonzero-entry index sets of the normals are pairwise disjoint.
bool validate_disjoint_support(std::span<const Hyperslab> slabs);
bool validate_disjoint_support(std::span<const Hyperplane> planes);

/// Intersection of hyperslabs whose normals have pairwise disjoint supports.
/// Its projection is the independent per-slab projection.
class SlabFamily final : public ConstraintSet {
 public:
  /// Throws std::invalid_argument on overlapping supports or mixed dimensions.
  SlabFamily(std::size_t dim, std::vector<Hyperslab> slabs);

  std::size_t dimension() const override { return dim_; }
  void project_in_place(std::span<double> x) const override;
  bool contains(std::span<const double> x) const override;
  std::string describe() const override { return "slab-family"; }

  const std::vector<Hyperslab>& slabs() const { return slabs_; }
  std::size_t size() const { return slabs_.size(); }


 protected:
  double distance_unchecked(std::span<const double> x) const override;
  double residual_inf_unchecked(std::span<const double> x) const override;
 private:
  std::size_t dim_;
  std::vector<Hyperslab> slabs_;
};

/// core_[radius] = {x : d_core(x) ≤ radius}.
class Enlargement final : public ConstraintSet {
 public:
  Enlargement(std::shared_ptr<const ConstraintSet> core, double radius);

  std::size_t dimension() const override { return core_->dimension(); }
  void project_in_place(std::span<double> x) const override;
  bool contains(std::span<const double> x) const override;
  bool is_convex() const override { return core_->is_convex(); }
  std::string describe() const override { return "enlargement"; }

  const ConstraintSet& core() const { return *core_; }
  const std::shared_ptr<const ConstraintSet>& core_ptr() const { return core_; }
  double radius() const { return radius_; }


 protected:
  double distance_unchecked(std::span<const double> x) const override;
  double residual_inf_unchecked(std::span<const double> x) const override;
 private:
  std::shared_ptr<const ConstraintSet> core_;
  double radius_;
};

/// Nearest point of [−hi, −lo] ∪ [lo, hi] to s, with 0 < lo ≤ hi.
/// The tie at s = 0 goes to +lo.
double project_two_sided_band(double lo, double hi, double s);

/// One nonconvex band {x : lo ≤ |⟨a,x⟩| ≤ hi}.
struct AbsBand {
  SparseVector normal;
  double lo;
  double hi;
};

/// Intersection of nonconvex bands with pairwise disjoint supports. The
/// projection (a nearest point, not unique at the tie) is again per band.
class AbsBandFamily final : public ConstraintSet {
 public:
  AbsBandFamily(std::size_t dim, std::vector<AbsBand> bands);

  std::size_t dimension() const override { return dim_; }
  void project_in_place(std::span<double> x) const override;
  bool contains(std::span<const double> x) const override;
  bool is_convex() const override { return false; }
  std::string describe() const override { return "abs-band-family"; }

  const std::vector<AbsBand>& bands() const { return bands_; }


 protected:
  double distance_unchecked(std::span<const double> x) const override;
  double residual_inf_unchecked(std::span<const double> x) const override;
 private:
  std::size_t dim_;
  std::vector<AbsBand> bands_;
};

Vector project_hyperplane(const Hyperplane& h, std::span<const double> x);
Vector project_hyperslab(const Hyperslab& s, std::span<const double> x);
Vector project_coordinate_affine(const CoordinateAffine& c,
                                 std::span<const double> x);
Vector project_enlargement(const Enlargement& e, std::span<const double> x);
double distance(const ConstraintSet& set, std::span<const double> x);

}  // namespace cycip
