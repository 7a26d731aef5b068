// Independent cross-check of the closed-form models: a finite collection of
// explicitly coupled modes propagated by the exponential of the sparse flow
// generator, with no use of the models' analytic solutions.
#pragma once

#include <optional>

#include <Eigen/SparseCore>

#include "decoh/environment.hpp"
#include "decoh/form_factor.hpp"
#include "decoh/grid.hpp"
#include "decoh/parallel.hpp"
#include "decoh/phase_space.hpp"
#include "decoh/spectral_kernel.hpp"

namespace decoh {

// Discretized coupled system.  Phase vectors are ordered
// (a, u_0 .. u_{N-1}, b, v_0 .. v_{N-1}).
struct ModeSystem {
  ModelSelector kind;
  FormFactor profile;
  GridScheme scheme = GridScheme::linear;
  FieldGrid grid;

  // Raw generator S of the linear flow dz/dt = S z; infinitesimally
  // symplectic (S Omega + Omega S^T = 0 for the block pairing).
  Eigen::SparseMatrix<double> generator;

  // Diagonal similarity used internally by the propagator; it tames the
  // omega^2 entries so Taylor steps converge in few terms.
  Eigen::VectorXd balance;
  Eigen::SparseMatrix<double> generator_balanced;
  double balanced_norm1 = 0.0;

  std::size_t modes() const { return grid.size(); }
  std::size_t dim() const { return 2 * (grid.size() + 1); }
};

ModeSystem build_mode_system(const FormFactor& j, const ModelSelector& kind,
                             int modes,
                             std::optional<GridScheme> scheme = {});

// Pack / unpack between phase points on the system grid and flat vectors.
Eigen::VectorXd pack(const ModeSystem& sys, const PhasePoint& p);
PhasePoint unpack(const ModeSystem& sys, const Eigen::VectorXd& z);

// exp(t S) z via scaled truncated-Taylor steps on the balanced coordinates.
Eigen::VectorXd propagate(const ModeSystem& sys, const Eigen::VectorXd& z,
                          double t);
PhasePoint propagate(const ModeSystem& sys, const PhasePoint& p, double t);

struct ChiComparison {
  double analytic = 0.0;
  double oracle = 0.0;
  double abs_diff = 0.0;
};

// Propagates the label (a, 0, b, 0), accumulates the discrete decoherence
// exponent of the resulting field components, and compares exp(-exponent)
// against the corresponding analytic module on the same grid.
ChiComparison oracle_chi(const ModeSystem& sys, const WeylLabel& l, double t,
                         const EnvironmentState& env);

struct DriftFit {
  double alpha_sq = 0.0;        // fitted secular drift coefficient
  double stderr_slope = 0.0;
  double ci_half_width = 0.0;   // 95% half width (Student t)
  int samples = 0;
};

// Velocity systems only: fits a(t) = b I_sin(t) + alpha^2 b t on the window
// [t_lo, t_hi] by ordinary least squares on the residual drift.  Throws
// WindowTooShortError for fewer than 8 samples or a degenerate extent.
DriftFit fit_drift(const ModeSystem& sys, double b, double t_lo, double t_hi,
                   int samples, Exec exec = Exec::parallel);

}  // namespace decoh
