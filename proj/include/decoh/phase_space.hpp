// Weyl phase-space labels for the particle and the field, and the uncoupled
// flows acting on them: a 2x2 rotation for the particle, a per-mode rotation
// for the field, and their product.
#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "decoh/grid.hpp"

namespace decoh {

// Label (a, b) of a particle Weyl operator: a multiplies momentum, b position.
struct WeylLabel {
  double a = 0.0;
  double b = 0.0;
};

// Which weighted norm a field component carries: minus_one components (the
// momentum-like u) are measured with weight omega^{+1}, plus_one components
// (the position-like v) with omega^{-1}.
enum class WeightRole { minus_one, plus_one };

// Real mode amplitudes on a shared frequency grid.  Values absorb the square
// root of the panel weight, so discrete norms are plain weighted sums of
// squares and the symplectic pairing is the Euclidean dot product.
class FieldVector {
 public:
  FieldVector() = default;
  FieldVector(std::shared_ptr<const std::vector<double>> grid,
              std::vector<double> values, WeightRole role);

  static FieldVector zeros(std::shared_ptr<const std::vector<double>> grid,
                           WeightRole role);

  std::size_t size() const { return values_.size(); }
  const std::vector<double>& omega() const { return *grid_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  WeightRole role() const { return role_; }
  const std::shared_ptr<const std::vector<double>>& shared_grid() const {
    return grid_;
  }

  // sum_i v_i^2 w_i^{+-1} according to the role.
  double weighted_norm_sq() const;

  bool same_grid(const FieldVector& other) const;

 private:
  std::shared_ptr<const std::vector<double>> grid_;
  std::vector<double> values_;
  WeightRole role_ = WeightRole::minus_one;
};

// Full phase point: particle label plus field components.  u carries the
// minus_one role, v the plus_one role, on one shared grid.
struct PhasePoint {
  double a = 0.0;
  FieldVector u;
  double b = 0.0;
  FieldVector v;
};

// Euclidean pairing a b' - b a' + <u, v'> - <v, u'> preserved by all flows.
double symplectic_pairing(const PhasePoint& x, const PhasePoint& y);

// Harmonic rotation of (a, b) with frequency omega0 >= 0; omega0 = 0 is the
// exact free limit a + b t, b.
WeylLabel particle_flow(const WeylLabel& l, double omega0, double t);

// Per-mode rotation u_i -> u_i cos(w_i t) + v_i sin(w_i t) / w_i,
// v_i -> -u_i w_i sin(w_i t) + v_i cos(w_i t).
std::pair<FieldVector, FieldVector> field_flow(const FieldVector& u,
                                               const FieldVector& v, double t);

// Uncoupled product of particle_flow and field_flow.
PhasePoint product_flow(const PhasePoint& p, double omega0, double t);

}  // namespace decoh
