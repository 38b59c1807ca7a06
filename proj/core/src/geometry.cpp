#include "cycip/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

namespace cycip {

DimensionError::DimensionError(std::size_t expected, std::size_t actual)
    : std::invalid_argument("dimension mismatch: expected " +
                            std::to_string(expected) + ", got " +
                            std::to_string(actual)) {}

void require_dimension(std::size_t expected, std::size_t actual) {
  if (expected != actual) throw DimensionError(expected, actual);
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_dimension(a.size(), b.size());
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

double distance2(std::span<const double> a, std::span<const double> b) {
  require_dimension(a.size(), b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double distance_inf(std::span<const double> a, std::span<const double> b) {
  require_dimension(a.size(), b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// --- SparseVector -----------------------------------------------------------

SparseVector SparseVector::from_dense(std::span<const double> dense) {
  SparseVector s;
  s.dim = dense.size();
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) {
      s.index.push_back(i);
      s.value.push_back(dense[i]);
    }
  }
  return s;
}

double SparseVector::dot(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t k = 0; k < index.size(); ++k) s += value[k] * x[index[k]];
  return s;
}

double SparseVector::squared_norm() const {
  double s = 0.0;
  for (double v : value) s += v * v;
  return s;
}

void SparseVector::axpy(double scale, std::span<double> x) const {
  for (std::size_t k = 0; k < index.size(); ++k) x[index[k]] += scale * value[k];
}

Vector SparseVector::to_dense() const {
  Vector d(dim, 0.0);
  for (std::size_t k = 0; k < index.size(); ++k) d[index[k]] = value[k];
  return d;
}

namespace {

void check_normal(const SparseVector& a) {
  if (a.dim == 0) throw std::invalid_argument("normal must have dimension >= 1");
  for (std::size_t k = 0; k < a.index.size(); ++k) {
    if (a.index[k] >= a.dim) throw std::invalid_argument("normal index out of range");
    if (k > 0 && a.index[k] <= a.index[k - 1])
      throw std::invalid_argument("normal indices must be strictly increasing");
    if (!std::isfinite(a.value[k])) throw std::invalid_argument("normal must be finite");
  }
  if (!(a.squared_norm() > 0.0)) throw std::invalid_argument("normal must be nonzero");
}


// Amount by which v leaves [lower, upper]; 0 inside.
double violation(double v, double lower, double upper) {
  if (v < lower) return lower - v;
  if (v > upper) return v - upper;
  return 0.0;
}

double max_abs_entry(const SparseVector& a) {
  double m = 0.0;
  for (double v : a.value) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

// --- ConstraintSet ----------------------------------------------------------

bool ConstraintSet::contains(std::span<const double> x) const {
  return distance(x) == 0.0;
}

Vector ConstraintSet::project(std::span<const double> x) const {
  require_dimension(dimension(), x.size());
  Vector p(x.begin(), x.end());
  project_in_place(p);
  return p;
}

double ConstraintSet::distance(std::span<const double> x) const {
  require_dimension(dimension(), x.size());
  return distance_unchecked(x);
}

double ConstraintSet::residual_inf(std::span<const double> x) const {
  require_dimension(dimension(), x.size());
  return residual_inf_unchecked(x);
}

double ConstraintSet::distance_unchecked(std::span<const double> x) const {
  return distance2(x, project(x));
}

double ConstraintSet::residual_inf_unchecked(std::span<const double> x) const {
  return distance_inf(x, project(x));
}

// --- Singleton --------------------------------------------------------------

Singleton::Singleton(Vector point) : point_(std::move(point)) {
  if (point_.empty()) throw std::invalid_argument("singleton needs dimension >= 1");
}

void Singleton::project_in_place(std::span<double> x) const {
  std::copy(point_.begin(), point_.end(), x.begin());
}

bool Singleton::contains(std::span<const double> x) const {
  require_dimension(dimension(), x.size());
  return std::equal(point_.begin(), point_.end(), x.begin());
}

// --- Hyperplane -------------------------------------------------------------

Hyperplane::Hyperplane(std::span<const double> normal, double offset)
    : Hyperplane(SparseVector::from_dense(normal), offset) {
  if (normal.empty()) throw std::invalid_argument("normal must have dimension >= 1");
}

Hyperplane::Hyperplane(SparseVector normal, double offset)
    : normal_(std::move(normal)), offset_(offset) {
  check_normal(normal_);
  if (!std::isfinite(offset_)) throw std::invalid_argument("hyperplane offset must be finite");
  normal_sq_ = normal_.squared_norm();
  normal_norm_ = std::sqrt(normal_sq_);
}

void Hyperplane::project_in_place(std::span<double> x) const {
  const double r = normal_.dot(x) - offset_;
  if (r != 0.0) normal_.axpy(-r / normal_sq_, x);
}

bool Hyperplane::contains(std::span<const double> x) const {
  require_dimension(dimension(), x.size());
  return normal_.dot(x) == offset_;
}

double Hyperplane::distance_unchecked(std::span<const double> x) const {
  return std::abs(normal_.dot(x) - offset_) / normal_norm_;
}

double Hyperplane::residual_inf_unchecked(std::span<const double> x) const {
  return std::abs(normal_.dot(x) - offset_) / normal_sq_ * max_abs_entry(normal_);
}

double Hyperplane::signed_distance(std::span<const double> x) const {
  return (normal_.dot(x) - offset_) / normal_norm_;
}

// --- Hyperslab --------------------------------------------------------------

Hyperslab::Hyperslab(std::span<const double> normal, double lower, double upper)
    : Hyperslab(SparseVector::from_dense(normal), lower, upper) {
  if (normal.empty()) throw std::invalid_argument("normal must have dimension >= 1");
}

Hyperslab::Hyperslab(SparseVector normal, double lower, double upper)
    : normal_(std::move(normal)), lower_(lower), upper_(upper) {
  check_normal(normal_);
  if (std::isnan(lower_) || std::isnan(upper_) || !(lower_ <= upper_))
    throw std::invalid_argument("hyperslab needs lower <= upper");
  if (lower_ == std::numeric_limits<double>::infinity() ||
      upper_ == -std::numeric_limits<double>::infinity())
    throw std::invalid_argument("hyperslab is empty");
  normal_sq_ = normal_.squared_norm();
}

void Hyperslab::project_in_place(std::span<double> x) const {
  const double v = normal_.dot(x);
  const double c = std::clamp(v, lower_, upper_);
  if (v != c) normal_.axpy(-(v - c) / normal_sq_, x);
}

bool Hyperslab::contains(std::span<const double> x) const {
  require_dimension(dimension(), x.size());
  const double v = normal_.dot(x);
  return lower_ <= v && v <= upper_;
}

double Hyperslab::distance_unchecked(std::span<const double> x) const {
  return violation(normal_.dot(x), lower_, upper_) / std::sqrt(normal_sq_);
}

double Hyperslab::residual_inf_unchecked(std::span<const double> x) const {
  return violation(normal_.dot(x), lower_, upper_) / normal_sq_ * max_abs_entry(normal_);
}

bool Hyperslab::bounded() const {
  return std::isfinite(lower_) && std::isfinite(upper_);
}

Hyperplane Hyperslab::midplane() const {
  if (!bounded()) throw std::logic_error("halfspace has no midplane");
  return Hyperplane(normal_, 0.5 * (lower_ + upper_));
}

double Hyperslab::radius() const {
  if (!bounded()) throw std::logic_error("halfspace has no finite radius");
  return 0.5 * (upper_ - lower_) / std::sqrt(normal_sq_);
}

// --- CoordinateAffine -------------------------------------------------------

CoordinateAffine::CoordinateAffine(std::size_t dim, std::vector<std::size_t> indices,
                                   std::vector<double> values)
    : dim_(dim), indices_(std::move(indices)), values_(std::move(values)) {
  if (dim_ == 0) throw std::invalid_argument("dimension must be >= 1");
  if (indices_.size() != values_.size())
    throw std::invalid_argument("coordinate-affine: indices and values differ in length");
  std::unordered_set<std::size_t> seen;
  for (std::size_t j : indices_) {
    if (j >= dim_)
      throw std::out_of_range("coordinate-affine: index " + std::to_string(j) +
                              " out of range for dimension " + std::to_string(dim_));
    if (!seen.insert(j).second)
      throw std::invalid_argument("coordinate-affine: duplicate index " + std::to_string(j));
  }
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("coordinate-affine: values must be finite");
}

void CoordinateAffine::project_in_place(std::span<double> x) const {
  for (std::size_t k = 0; k < indices_.size(); ++k) x[indices_[k]] = values_[k];
}

bool CoordinateAffine::contains(std::span<const double> x) const {
  require_dimension(dim_, x.size());
  for (std::size_t k = 0; k < indices_.size(); ++k)
    if (x[indices_[k]] != values_[k]) return false;
  return true;
}

// --- SlabFamily -------------------------------------------------------------

namespace {

template <typename Normals>
bool supports_disjoint(const Normals& normals) {
  std::unordered_set<std::size_t> used;
  for (const SparseVector* a : normals)
    for (std::size_t i : a->index)
      if (!used.insert(i).second) return false;
  return true;
}

}  // namespace

bool validate_disjoint_support(std::span<const Hyperslab> slabs) {
  std::vector<const SparseVector*> normals;
  for (const auto& s : slabs) normals.push_back(&s.normal());
  return supports_disjoint(normals);
}

bool validate_disjoint_support(std::span<const Hyperplane> planes) {
  std::vector<const SparseVector*> normals;
  for (const auto& p : planes) normals.push_back(&p.normal());
  return supports_disjoint(normals);
}

SlabFamily::SlabFamily(std::size_t dim, std::vector<Hyperslab> slabs)
    : dim_(dim), slabs_(std::move(slabs)) {
  if (dim_ == 0) throw std::invalid_argument("dimension must be >= 1");
  for (const auto& s : slabs_) require_dimension(dim_, s.dimension());
  if (!validate_disjoint_support(slabs_))
    throw std::invalid_argument("slab family: normals have overlapping supports");
}

void SlabFamily::project_in_place(std::span<double> x) const {
  for (const auto& s : slabs_) s.project_in_place(x);
}

bool SlabFamily::contains(std::span<const double> x) const {
  require_dimension(dim_, x.size());
  return std::all_of(slabs_.begin(), slabs_.end(),
                     [&](const Hyperslab& s) { return s.contains(x); });
}

double SlabFamily::distance_unchecked(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& s : slabs_) {
    const double d = s.distance(x);
    sum += d * d;
  }
  return std::sqrt(sum);
}

double SlabFamily::residual_inf_unchecked(std::span<const double> x) const {
  double m = 0.0;
  for (const auto& s : slabs_) m = std::max(m, s.residual_inf(x));
  return m;
}

// --- Enlargement ------------------------------------------------------------

Enlargement::Enlargement(std::shared_ptr<const ConstraintSet> core, double radius)
    : core_(std::move(core)), radius_(radius) {
  if (!core_) throw std::invalid_argument("enlargement needs a core set");
  if (!(radius_ >= 0.0) || !std::isfinite(radius_))
    throw std::invalid_argument("enlargement radius must be finite and >= 0");
}

void Enlargement::project_in_place(std::span<double> x) const {
  Vector p(x.begin(), x.end());
  core_->project_in_place(p);
  const double d = distance2(x, p);
  if (d <= radius_) return;
  const double t = radius_ / d;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = p[i] + t * (x[i] - p[i]);
}

bool Enlargement::contains(std::span<const double> x) const {
  return core_->distance(x) <= radius_;
}

double Enlargement::distance_unchecked(std::span<const double> x) const {
  return std::max(0.0, core_->distance(x) - radius_);
}

// x − P(x) = (1 − β/d)(x − P_core(x)) outside the enlargement.
double Enlargement::residual_inf_unchecked(std::span<const double> x) const {
  const double d = core_->distance(x);
  if (d <= radius_) return 0.0;
  return (d - radius_) / d * core_->residual_inf(x);
}

// --- AbsBandFamily ----------------------------------------------------------

double project_two_sided_band(double lo, double hi, double s) {
  if (!(lo > 0.0) || !(lo <= hi)) throw std::invalid_argument("band needs 0 < lo <= hi");
  if (s >= 0.0) return std::clamp(s, lo, hi);
  return std::clamp(s, -hi, -lo);
}

AbsBandFamily::AbsBandFamily(std::size_t dim, std::vector<AbsBand> bands)
    : dim_(dim), bands_(std::move(bands)) {
  std::vector<const SparseVector*> normals;
  for (const auto& b : bands_) {
    check_normal(b.normal);
    require_dimension(dim_, b.normal.dim);
    if (!(b.lo > 0.0) || !(b.lo <= b.hi))
      throw std::invalid_argument("band needs 0 < lo <= hi");
    normals.push_back(&b.normal);
  }
  if (!supports_disjoint(normals))
    throw std::invalid_argument("band family: normals have overlapping supports");
}

void AbsBandFamily::project_in_place(std::span<double> x) const {
  for (const auto& b : bands_) {
    const double v = b.normal.dot(x);
    const double c = project_two_sided_band(b.lo, b.hi, v);
    if (v != c) b.normal.axpy(-(v - c) / b.normal.squared_norm(), x);
  }
}

bool AbsBandFamily::contains(std::span<const double> x) const {
  require_dimension(dim_, x.size());
  for (const auto& b : bands_) {
    const double v = std::abs(b.normal.dot(x));
    if (!(b.lo <= v && v <= b.hi)) return false;
  }
  return true;
}

double AbsBandFamily::distance_unchecked(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& b : bands_) {
    const double v = b.normal.dot(x);
    const double r = v - project_two_sided_band(b.lo, b.hi, v);
    sum += r * r / b.normal.squared_norm();
  }
  return std::sqrt(sum);
}

double AbsBandFamily::residual_inf_unchecked(std::span<const double> x) const {
  double m = 0.0;
  for (const auto& b : bands_) {
    const double v = b.normal.dot(x);
    const double r = std::abs(v - project_two_sided_band(b.lo, b.hi, v));
    m = std::max(m, r / b.normal.squared_norm() * max_abs_entry(b.normal));
  }
  return m;
}

// --- free functions ---------------------------------------------------------

Vector project_hyperplane(const Hyperplane& h, std::span<const double> x) {
  return h.project(x);
}

Vector project_hyperslab(const Hyperslab& s, std::span<const double> x) {
  return s.project(x);
}

Vector project_coordinate_affine(const CoordinateAffine& c, std::span<const double> x) {
  return c.project(x);
}

Vector project_enlargement(const Enlargement& e, std::span<const double> x) {
  return e.project(x);
}

double distance(const ConstraintSet& set, std::span<const double> x) {
  return set.distance(x);
}

}  // namespace cycip
