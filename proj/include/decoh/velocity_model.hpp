// Particle linearly coupled to the boson field through its momentum.  The
// particle momentum label is conserved, the position label drifts, and the
// reduced Weyl dynamics attenuates by exp(-exponent) with the exponent given
// by closed-form weighted integrals of the spectral profile.
#pragma once

#include <optional>
#include <vector>

#include "decoh/curve.hpp"
#include "decoh/environment.hpp"
#include "decoh/form_factor.hpp"
#include "decoh/grid.hpp"
#include "decoh/parallel.hpp"
#include "decoh/phase_space.hpp"
#include "decoh/spectral_kernel.hpp"

namespace decoh {

struct VelocityOptions {
  int grid_modes = 1024;
  std::optional<GridScheme> scheme;    // default: by infrared class
  std::optional<double> alpha_sq;      // override the drift coefficient
};

class VelocityModel {
 public:
  using Options = VelocityOptions;

  // Throws UnboundedError when the coupling norm exceeds 1 (supercritical);
  // the critical case is admitted with a frozen drift (alpha^2 = 0).
  explicit VelocityModel(FormFactor j, Options opts = {});

  const FormFactor& form_factor() const { return j_; }
  const FieldGrid& grid() const { return grid_; }
  Boundedness boundedness() const { return boundedness_; }
  double coupling_norm_sq() const { return coupling_norm_sq_; }

  // Drift coefficient of the position label: 1 - int J w^-2 dw by default,
  // exactly 0 at criticality.
  double alpha_sq() const { return alpha_sq_; }

  // Phase point at time t starting from (a, 0, b, 0).  The momentum label is
  // conserved exactly; field components are sampled on the model grid.
  PhasePoint flow(const WeylLabel& l, double t) const;

  // Decoherence exponent of a label with momentum component b:
  // (b^2 / 2) int J w^-3 (1 - cos w t) dw, thermally weighted by
  // coth(beta w / 2) when the environment is thermal.
  double exponent(double b, double t, const EnvironmentState& env) const;

  // Unit-momentum vacuum exponent phi(t) = exponent(1, t, vacuum).
  double phi(double t) const;

  // Non-decreasing forward envelope phi~(t_k) = min over grid s >= t_k of
  // phi(s); equals phi itself whenever phi is monotone.
  std::vector<double> phi_envelope(const std::vector<double>& times,
                                   Exec exec = Exec::parallel) const;

  struct Reduced {
    WeylLabel label;
    double abs_chi;
  };

  // Reduced Weyl dynamics: the evolved label and the attenuation factor.
  // Labels with b = 0 are exactly invariant with abs_chi = 1.
  Reduced reduced_weyl(const WeylLabel& l, double t,
                       const EnvironmentState& env) const;

  // Curve of one label over a time grid; parallel over samples, identical
  // output for both execution policies.
  DecoherenceCurve sample_curve(const WeylLabel& l,
                                const std::vector<double>& times,
                                const EnvironmentState& env,
                                Exec exec = Exec::parallel) const;

 private:
  FormFactor j_;
  FieldGrid grid_;
  Boundedness boundedness_ = Boundedness::subcritical;
  double coupling_norm_sq_ = 0.0;
  double alpha_sq_ = 1.0;
};

}  // namespace decoh
