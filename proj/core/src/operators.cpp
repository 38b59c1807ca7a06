#include "cycip/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cycip {

Vector StepOperator::apply(std::span<const double> x) const {
  require_dimension(target().dimension(), x.size());
  Vector y(x.begin(), x.end());
  apply_in_place(y);
  return y;
}

// --- RelaxedProjector -------------------------------------------------------

RelaxedProjector::RelaxedProjector(std::shared_ptr<const ConstraintSet> set,
                                   double relaxation)
    : set_(std::move(set)), relaxation_(relaxation) {
  if (!set_) throw std::invalid_argument("relaxed projector needs a set");
  if (!(relaxation_ > 0.0 && relaxation_ < 2.0))
    throw std::invalid_argument("relaxation must lie in (0, 2)");
}

void RelaxedProjector::apply_in_place(std::span<double> x) const {
  if (relaxation_ == 1.0) {
    set_->project_in_place(x);
    return;
  }
  Vector p(x.begin(), x.end());
  set_->project_in_place(p);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = (1.0 - relaxation_) * x[i] + relaxation_ * p[i];
}

Vector apply_relaxed(const RelaxedProjector& r, std::span<const double> x) {
  return r.apply(x);
}

// --- IntrepidProjector ------------------------------------------------------

double intrepid_factor(double distance, double radius) {
  return 1.0 - std::clamp(distance, radius, 2.0 * radius) / radius;
}

IntrepidProjector::IntrepidProjector(std::shared_ptr<const ConstraintSet> core,
                                     double radius)
    : core_(std::move(core)), radius_(radius) {
  if (!core_) throw std::invalid_argument("intrepid projector needs a core set");
  if (!(radius_ > 0.0) || !std::isfinite(radius_))
    throw std::invalid_argument("intrepid radius must be finite and > 0");
  target_ = std::make_shared<const Enlargement>(core_, radius_);
}

IntrepidRegime IntrepidProjector::regime(std::span<const double> x) const {
  const double d = core_->distance(x);
  if (d >= 2.0 * radius_) return IntrepidRegime::projection;
  if (d <= radius_) return IntrepidRegime::identity;
  return IntrepidRegime::reflection;
}

void IntrepidProjector::apply_in_place(std::span<double> x) const {
  Vector p(x.begin(), x.end());
  core_->project_in_place(p);
  const double d = distance2(x, p);
  if (d >= 2.0 * radius_) {
    std::copy(p.begin(), p.end(), x.begin());
  } else if (d > radius_) {
    const double f = 1.0 - d / radius_;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += f * (x[i] - p[i]);
  }
}

Vector apply_intrepid(const IntrepidProjector& q, std::span<const double> x) {
  return q.apply(x);
}

// --- BlockIntrepidProjector -------------------------------------------------

namespace {

std::shared_ptr<const SlabFamily> family_from_blocks(
    std::size_t dim, const std::vector<BlockIntrepidProjector::Block>& blocks) {
  std::vector<Hyperslab> slabs;
  slabs.reserve(blocks.size());
  for (const auto& b : blocks) {
    if (!(b.radius >= 0.0) || !std::isfinite(b.radius))
      throw std::invalid_argument("block radius must be finite and >= 0");
    const double w = b.radius * b.core.normal_norm();
    slabs.emplace_back(b.core.normal(), b.core.offset() - w, b.core.offset() + w);
  }
  return std::make_shared<const SlabFamily>(dim, std::move(slabs));
}

// One intrepid step along the normal a of a hyperplane ⟨a,x⟩ = mid.
inline void intrepid_along_normal(const SparseVector& a, double a_sq, double mid,
                                  double radius, std::span<double> x) {
  const double r = a.dot(x) - mid;
  if (r == 0.0) return;
  const double d = std::abs(r) / std::sqrt(a_sq);
  if (d >= 2.0 * radius) {
    a.axpy(-r / a_sq, x);
  } else if (d > radius) {
    // x + f(x − P_Z x) with x − P_Z x = (r/‖a‖²) a
    a.axpy((1.0 - d / radius) * r / a_sq, x);
  }
}

// Rounding can leave a step that should end inside lo ≤ ⟨a,x⟩ ≤ hi a few
// ulps outside, or too small to change x at all. Aim inside the bound
// instead, doubling the inset until x is a member. The first inset is a tiny
// fraction of the width rather than one ulp: ulp-sized corrections on one
// slab get undone by the next slab's, and the sweep cycles forever.
void settle_inside(const Hyperslab& s, std::span<double> x) {
  const double lo = s.lower(), hi = s.upper();
  double inset = 0.0;
  for (int tries = 0; tries < 128; ++tries) {
    const double v = s.normal().dot(x);
    if (lo <= v && v <= hi) return;
    const double bound = v < lo ? lo : hi;
    inset = inset == 0.0 ? std::max(0x1p-40 * (hi - lo),
                                    std::numeric_limits<double>::epsilon() * std::abs(bound))
                         : 2.0 * inset;
    inset = std::min(inset, 0.5 * (hi - lo));
    const double target = v < lo ? lo + inset : hi - inset;
    s.normal().axpy((target - v) / s.squared_normal_norm(), x);
  }
}

}  // namespace

BlockIntrepidProjector::BlockIntrepidProjector(std::size_t dim, std::vector<Block> blocks)
    : blocks_(std::move(blocks)), target_(family_from_blocks(dim, blocks_)) {}

BlockIntrepidProjector::BlockIntrepidProjector(std::shared_ptr<const SlabFamily> family)
    : target_(std::move(family)) {
  if (!target_) throw std::invalid_argument("block intrepid projector needs a family");
  blocks_.reserve(target_->size());
  for (const auto& s : target_->slabs()) blocks_.push_back({s.midplane(), s.radius()});
}

void BlockIntrepidProjector::apply_in_place(std::span<double> x) const {
  const auto& slabs = target_->slabs();
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto& b = blocks_[k];
    if (b.radius == 0.0) {
      b.core.project_in_place(x);
      continue;
    }
    // membership is decided on the bounds, not on d ≤ β, so that fixed
    // points of this operator are exactly the members of the slab
    const double v = slabs[k].normal().dot(x);
    if (slabs[k].lower() <= v && v <= slabs[k].upper()) continue;
    intrepid_along_normal(b.core.normal(), b.core.normal_norm() * b.core.normal_norm(),
                          b.core.offset(), b.radius, x);
    settle_inside(slabs[k], x);
  }
}

Vector apply_block_intrepid(const BlockIntrepidProjector& b, std::span<const double> x) {
  return b.apply(x);
}

// --- BandIntrepidProjector --------------------------------------------------

BandIntrepidProjector::BandIntrepidProjector(std::shared_ptr<const AbsBandFamily> family)
    : family_(std::move(family)) {
  if (!family_) throw std::invalid_argument("band intrepid projector needs a family");
}

void BandIntrepidProjector::apply_in_place(std::span<double> x) const {
  for (const auto& b : family_->bands()) {
    const double v = b.normal.dot(x);
    const double sign = v >= 0.0 ? 1.0 : -1.0;
    const double mid = sign * 0.5 * (b.lo + b.hi);
    const double a_sq = b.normal.squared_norm();
    const double radius = 0.5 * (b.hi - b.lo) / std::sqrt(a_sq);
    if (radius == 0.0) {
      b.normal.axpy(-(v - mid) / a_sq, x);
      continue;
    }
    intrepid_along_normal(b.normal, a_sq, mid, radius, x);
  }
}

// --- certificate ------------------------------------------------------------

double decrease_certificate(const IntrepidProjector& q, std::span<const double> x,
                            std::span<const double> y, double alpha) {
  require_dimension(q.target().dimension(), x.size());
  require_dimension(q.target().dimension(), y.size());
  const double beta = q.radius();
  if (!(alpha >= 0.0 && alpha <= beta))
    throw std::invalid_argument("certificate needs 0 <= alpha <= beta");
  const double dy = q.core().distance(y);
  if (dy > alpha + 1e-12 * (1.0 + alpha))
    throw std::invalid_argument("certificate needs d_Z(y) <= alpha");
  const Vector qx = q.apply(x);
  const double lhs = distance2(x, y) * distance2(x, y) - distance2(qx, y) * distance2(qx, y);
  return lhs - 2.0 * (beta - alpha) * distance2(x, qx);
}

}  // namespace cycip
