// Field-state functionals: expectation modulus and phase of a Weyl operator
// in coherent (vacuum-like) and thermal states of the boson field.
#pragma once

#include <complex>
#include <vector>

#include "decoh/phase_space.hpp"

namespace decoh {

// State of the boson field entering a reduced expectation.
struct EnvironmentState {
  enum class Kind { coherent_vacuum_modulus, thermal };
  Kind kind = Kind::coherent_vacuum_modulus;
  double beta = 0.0;  // inverse temperature, thermal only

  static EnvironmentState vacuum() {
    return {Kind::coherent_vacuum_modulus, 0.0};
  }
  static EnvironmentState thermal(double beta);
  bool is_thermal() const { return kind == Kind::thermal; }
};

// Decoherence exponent (u, v; env) = 1/4 ||u||_{-1}^2 + 1/4 ||v||_{+1}^2,
// with each mode additionally weighted by coth(beta w / 2) in a thermal
// state.  The expectation modulus is exp(-exponent).
double decoherence_exponent(const FieldVector& u, const FieldVector& v,
                            const EnvironmentState& env);

// |expectation| in any coherent state: independent of the state's amplitude.
double abs_chi_coherent(const FieldVector& u, const FieldVector& v);

// Thermal expectation modulus at inverse temperature beta; strictly below the
// coherent value whenever (u, v) != 0.
double chi_thermal(const FieldVector& u, const FieldVector& v, double beta);

// Full coherent expectation including the state-dependent phase
// Im <M^{1/2} u + i M^{-1/2} v | g> for coherent amplitude g on the grid.
std::complex<double> coherent_phase(const FieldVector& u, const FieldVector& v,
                                    const std::vector<std::complex<double>>& g);

}  // namespace decoh
