// Weighted and oscillatory integrals of a spectral profile, infrared
// classification, and the boundedness test for the coupled models.
#pragma once

#include <optional>

#include "decoh/form_factor.hpp"

namespace decoh {

struct WeightedIntegral {
  double value = 0.0;
  double abs_error = 0.0;
  bool converged = false;
};

enum class IrClass { regular, ir_divergent };

enum class Boundedness { subcritical, critical, supercritical };

// Oscillatory kernels k(w t).  The squared pair satisfies
// (1 - cos x)^2 + sin^2 x = 2 (1 - cos x).
enum class OscKernel { one_minus_cos, sin_wt, one_minus_cos_sq, sin_sq };

// Which coupled model a criticality question refers to: the velocity coupling
// compares the coupling norm against 1, the position coupling against
// omega0^2.
struct ModelSelector {
  enum class Kind { velocity, position };
  Kind kind = Kind::velocity;
  double omega0 = 0.0;
  static ModelSelector velocity() { return {Kind::velocity, 0.0}; }
  static ModelSelector position(double omega0) {
    return {Kind::position, omega0};
  }
};

// int_0^inf J(w) w^p dw.  Throws IrDivergentError when the small-omega
// pre-screen fails.
WeightedIntegral weighted_norm_sq(const FormFactor& j, double p);

// Regular iff int_0^1 J(w) w^-3 dw converges; tabulated profiles are
// classified by the estimated small-omega slope (throws IndeterminateError
// when the slope is too uncertain to decide).
IrClass ir_classify(const FormFactor& j);

// int_0^inf J(w) w^p k(w t) dw, optionally with a thermal coth(beta w / 2)
// weight.  Supported for |t| <= 1e6; odd kernels flip sign for t < 0.
WeightedIntegral oscillatory_integral(const FormFactor& j, double p, double t,
                                      OscKernel kernel,
                                      std::optional<double> beta = {});

// Compares the coupling norm int J w^-2 dw against the model's threshold
// with absolute tolerance 1e-12 (scaled by the threshold).
Boundedness boundedness_check(const FormFactor& j, const ModelSelector& model);

const char* to_string(Boundedness b);
const char* to_string(IrClass c);

}  // namespace decoh
