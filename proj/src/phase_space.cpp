#include "decoh/phase_space.hpp"

#include <cmath>

#include "decoh/errors.hpp"

namespace decoh {

FieldVector::FieldVector(std::shared_ptr<const std::vector<double>> grid,
                         std::vector<double> values, WeightRole role)
    : grid_(std::move(grid)), values_(std::move(values)), role_(role) {
  if (!grid_) throw ConfigError("field vector needs a grid");
  if (grid_->size() != values_.size())
    throw GridMismatchError("field vector length differs from its grid");
  for (double w : *grid_)
    if (!(w > 0.0)) throw ConfigError("grid frequencies must be positive");
}

FieldVector FieldVector::zeros(
    std::shared_ptr<const std::vector<double>> grid, WeightRole role) {
  std::vector<double> v(grid->size(), 0.0);
  return FieldVector(std::move(grid), std::move(v), role);
}

double FieldVector::weighted_norm_sq() const {
  double s = 0.0;
  const auto& w = *grid_;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double wt = role_ == WeightRole::minus_one ? w[i] : 1.0 / w[i];
    s += values_[i] * values_[i] * wt;
  }
  return s;
}

bool FieldVector::same_grid(const FieldVector& other) const {
  if (grid_ == other.grid_) return true;
  if (!grid_ || !other.grid_) return false;
  return *grid_ == *other.grid_;
}

double symplectic_pairing(const PhasePoint& x, const PhasePoint& y) {
  if (!x.u.same_grid(y.u) || !x.v.same_grid(y.v))
    throw GridMismatchError("symplectic pairing needs matching grids");
  double s = x.a * y.b - x.b * y.a;
  for (std::size_t i = 0; i < x.u.size(); ++i)
    s += x.u.values()[i] * y.v.values()[i] - x.v.values()[i] * y.u.values()[i];
  return s;
}

WeylLabel particle_flow(const WeylLabel& l, double omega0, double t) {
  if (!(omega0 >= 0.0)) throw ConfigError("particle frequency must be >= 0");
  if (omega0 == 0.0) return {l.a + l.b * t, l.b};
  const double c = std::cos(omega0 * t);
  const double s = std::sin(omega0 * t);
  return {l.a * c + l.b * s / omega0, -l.a * omega0 * s + l.b * c};
}

std::pair<FieldVector, FieldVector> field_flow(const FieldVector& u,
                                               const FieldVector& v,
                                               double t) {
  if (!u.same_grid(v))
    throw GridMismatchError("field flow needs u and v on one grid");
  if (u.role() != WeightRole::minus_one || v.role() != WeightRole::plus_one)
    throw ConfigError("field flow expects (u, v) with roles (-1, +1)");
  const auto& w = u.omega();
  std::vector<double> un(u.size()), vn(v.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double c = std::cos(w[i] * t);
    const double s = std::sin(w[i] * t);
    un[i] = u.values()[i] * c + v.values()[i] * s / w[i];
    vn[i] = -u.values()[i] * w[i] * s + v.values()[i] * c;
  }
  return {FieldVector(u.shared_grid(), std::move(un), WeightRole::minus_one),
          FieldVector(v.shared_grid(), std::move(vn), WeightRole::plus_one)};
}

PhasePoint product_flow(const PhasePoint& p, double omega0, double t) {
  PhasePoint out;
  const WeylLabel l = particle_flow({p.a, p.b}, omega0, t);
  auto [un, vn] = field_flow(p.u, p.v, t);
  out.a = l.a;
  out.b = l.b;
  out.u = std::move(un);
  out.v = std::move(vn);
  return out;
}

}  // namespace decoh
