// Particle harmonically bound and coupled to the boson field through its
// position.  The coupled square-frequency operator is the rank-one bordering
// of the field dispersion by the particle row; its dense diagonalization
// drives the flow, and the resolvent's boundary values give the particle
// spectral density as an independent cross-check.
#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "decoh/curve.hpp"
#include "decoh/environment.hpp"
#include "decoh/form_factor.hpp"
#include "decoh/grid.hpp"
#include "decoh/parallel.hpp"
#include "decoh/phase_space.hpp"
#include "decoh/spectral_kernel.hpp"

namespace decoh {

struct PointMass {
  double lambda = 0.0;
  double weight = 0.0;
};

// Particle-sector spectral density rho00(lambda) sampled on quadrature nodes
// (Gauss-Kronrod panels), plus an optional discrete point mass.
struct SpectralDensity {
  std::vector<double> lambda;
  std::vector<double> rho;
  std::vector<double> weight;  // quadrature weights matching the nodes
  std::optional<PointMass> point_mass;
  double extrapolation_error = 0.0;        // boundary-offset extrapolation
  std::optional<double> edge_exponent;     // fitted lambda -> 0 power
  std::string metadata_json;

  double mass() const;            // integral plus point mass
  double moment(int k) const;     // int lambda^k rho + point mass term

  std::string to_csv() const;     // columns: lambda, rho00
  std::string to_json() const;
  void write_csv(const std::string& path) const;
  void write_json(const std::string& path) const;
};

struct FriedrichsOptions {
  int grid_modes = 2048;
  std::optional<GridScheme> scheme;
};

class FriedrichsOperator {
 public:
  using Options = FriedrichsOptions;

  // Throws UnboundedError when the coupling norm exceeds omega0^2.
  FriedrichsOperator(double omega0, FormFactor j, Options opts = {});

  double omega0() const { return omega0_; }
  const FormFactor& form_factor() const { return j_; }
  const FieldGrid& grid() const { return grid_; }
  Boundedness boundedness() const { return boundedness_; }

  // Sigma(z) = int J(w) / (w^2 - z) dw for z off the spectral cut [0, inf);
  // throws OnCutError for real z >= 0.
  std::complex<double> self_energy(std::complex<double> z) const;

  // Particle spectral density via resolvent boundary values Im G(lambda + i
  // eps) extrapolated over offsets {100, 10, 1} x epsilon; epsilon <= 0
  // selects the default 1e-6 omega0^2.
  SpectralDensity spectral_density(double epsilon = 0.0,
                                   Exec exec = Exec::parallel) const;

  // Phase point at time t from (a, 0, b, 0) via the dense eigenbasis.
  PhasePoint flow(const WeylLabel& l, double t) const;

  // Decoherence exponent accumulated in the field components of flow(l, t).
  double exponent(const WeylLabel& l, double t,
                  const EnvironmentState& env) const;

  // Particle-corner matrix elements of cos(Mt) and M^-1 sin(Mt) from the
  // eigenbasis, and the same quantities integrated against a spectral
  // density (the resolvent cross-check path).
  double cos00(double t) const;
  double sin00(double t) const;
  static double cos00_from_density(const SpectralDensity& d, double t);
  static double sin00_from_density(const SpectralDensity& d, double t);

  // Curve of one label over a time grid (attenuation is label-dependent here,
  // not uniform in the momentum difference; flagged in the metadata).
  DecoherenceCurve sample_curve(const WeylLabel& l,
                                const std::vector<double>& times,
                                const EnvironmentState& env,
                                Exec exec = Exec::parallel) const;

 private:
  struct RhoEval {
    double rho;
    double err;
  };

  void ensure_eigen() const;
  std::complex<double> self_energy_near_cut(double lambda, double eps) const;
  RhoEval boundary_eval(double lambda, double eps_base) const;

  double omega0_ = 0.0;
  FormFactor j_;
  FieldGrid grid_;
  Boundedness boundedness_ = Boundedness::subcritical;
  double coupling_norm_sq_ = 0.0;

  mutable bool eigen_done_ = false;
  mutable Eigen::VectorXd eval_;   // eigenvalues of the bordered matrix
  mutable Eigen::MatrixXd evec_;   // columns are eigenvectors
};

}  // namespace decoh
