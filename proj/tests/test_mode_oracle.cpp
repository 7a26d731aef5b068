#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "decoh/environment.hpp"
#include "decoh/errors.hpp"
#include "decoh/form_factor.hpp"
#include "decoh/mode_oracle.hpp"
#include "decoh/phase_space.hpp"
#include "doctest.h"

using decoh::EnvironmentState;
using decoh::FormFactor;
using decoh::ModelSelector;
using decoh::ModeSystem;
using decoh::PhasePoint;
using decoh::WeylLabel;

namespace {

FormFactor subcritical_profile() {
  return FormFactor::power_law_with_norm(2.0, 2.0, 0.25);
}

// Dense block-antisymmetric pairing matrix for the (a, u, b, v) ordering.
Eigen::MatrixXd pairing_matrix(const ModeSystem& sys) {
  const auto n = static_cast<Eigen::Index>(sys.dim());
  const Eigen::Index half = n / 2;
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, n);
  omega.topRightCorner(half, half) = Eigen::MatrixXd::Identity(half, half);
  omega.bottomLeftCorner(half, half) = -Eigen::MatrixXd::Identity(half, half);
  return omega;
}

Eigen::VectorXd random_state(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  Eigen::VectorXd z(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = val(rng);
  return z;
}

}  // namespace

TEST_CASE("generators are infinitesimally symplectic, exactly") {
  for (auto kind : {ModelSelector::velocity(), ModelSelector::position(1.0)}) {
    const ModeSystem sys = decoh::build_mode_system(subcritical_profile(),
                                                    kind, 24);
    const Eigen::MatrixXd s = Eigen::MatrixXd(sys.generator);
    const Eigen::MatrixXd omega = pairing_matrix(sys);
    // S^T Omega + Omega S pairs identical floats with opposite signs, so the
    // cancellation is exact, not approximate.
    const Eigen::MatrixXd defect = s.transpose() * omega + omega * s;
    CHECK(defect.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("velocity generator conserves the momentum row") {
  const ModeSystem sys = decoh::build_mode_system(
      subcritical_profile(), ModelSelector::velocity(), 32);
  const Eigen::MatrixXd s = Eigen::MatrixXd(sys.generator);
  const auto brow = static_cast<Eigen::Index>(sys.modes()) + 1;
  CHECK(s.row(brow).cwiseAbs().maxCoeff() == 0.0);
  // Consequently the propagated momentum never moves a single bit.
  std::mt19937_64 rng(13);
  Eigen::VectorXd z = random_state(rng, sys.dim());
  const double b = z[brow];
  for (double t : {0.3, 2.0, 9.0}) {
    const Eigen::VectorXd zt = decoh::propagate(sys, z, t);
    CHECK(zt[brow] == b);
  }
}

TEST_CASE("propagation at t = 0 is the identity") {
  const ModeSystem sys = decoh::build_mode_system(
      subcritical_profile(), ModelSelector::position(1.3), 16);
  std::mt19937_64 rng(17);
  const Eigen::VectorXd z = random_state(rng, sys.dim());
  const Eigen::VectorXd z0 = decoh::propagate(sys, z, 0.0);
  CHECK((z0 - z).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("propagator satisfies the group law") {
  const ModeSystem sys = decoh::build_mode_system(
      subcritical_profile(), ModelSelector::velocity(), 24);
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> time(-4.0, 4.0);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::VectorXd z = random_state(rng, sys.dim());
    const double t = time(rng), s = time(rng);
    const Eigen::VectorXd once = decoh::propagate(sys, z, t + s);
    const Eigen::VectorXd twice =
        decoh::propagate(sys, decoh::propagate(sys, z, s), t);
    CHECK((once - twice).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("propagator preserves the symplectic pairing") {
  const ModeSystem sys = decoh::build_mode_system(
      subcritical_profile(), ModelSelector::position(1.0), 24);
  const Eigen::MatrixXd omega = pairing_matrix(sys);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> time(-6.0, 6.0);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::VectorXd z1 = random_state(rng, sys.dim());
    const Eigen::VectorXd z2 = random_state(rng, sys.dim());
    const double t = time(rng);
    const double before = z1.dot(omega * z2);
    const double after = decoh::propagate(sys, z1, t)
                             .dot(omega * decoh::propagate(sys, z2, t));
    CHECK(after == doctest::Approx(before).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("uncoupled systems reduce to independent rotations") {
  const ModeSystem sys = decoh::build_mode_system(
      FormFactor::power_law(1.0, 2.0, 0.0), ModelSelector::position(1.1), 8);
  PhasePoint p;
  p.a = 0.7;
  p.b = -0.4;
  p.u = decoh::FieldVector(sys.grid.shared_omega(),
                           std::vector<double>(sys.modes(), 0.5),
                           decoh::WeightRole::minus_one);
  p.v = decoh::FieldVector(sys.grid.shared_omega(),
                           std::vector<double>(sys.modes(), -0.25),
                           decoh::WeightRole::plus_one);
  const double t = 1.7;
  const PhasePoint moved = decoh::propagate(sys, p, t);
  // Particle rotates at omega0, each mode at its own frequency.
  const double w0 = 1.1;
  CHECK(moved.a == doctest::Approx(0.7 * std::cos(w0 * t) -
                                   0.4 * std::sin(w0 * t) / w0)
                       .epsilon(1e-12));
  CHECK(moved.b == doctest::Approx(-0.7 * w0 * std::sin(w0 * t) -
                                   0.4 * std::cos(w0 * t))
                       .epsilon(1e-12));
  for (std::size_t i = 0; i < sys.modes(); ++i) {
    const double w = sys.grid.omega()[i];
    CHECK(moved.u.values()[i] ==
          doctest::Approx(0.5 * std::cos(w * t) -
                          0.25 * std::sin(w * t) / w)
              .epsilon(1e-12));
  }
}

TEST_CASE("pack and unpack are inverse and grid-checked") {
  const ModeSystem sys = decoh::build_mode_system(
      subcritical_profile(), ModelSelector::velocity(), 12);
  std::mt19937_64 rng(29);
  const Eigen::VectorXd z = random_state(rng, sys.dim());
  const PhasePoint p = decoh::unpack(sys, z);
  const Eigen::VectorXd z2 = decoh::pack(sys, p);
  CHECK((z - z2).cwiseAbs().maxCoeff() == 0.0);
  // A phase point on a foreign grid is rejected.
  const ModeSystem other = decoh::build_mode_system(
      subcritical_profile(), ModelSelector::velocity(), 10);
  CHECK_THROWS_AS(decoh::pack(other, p), decoh::GridMismatchError);
}

TEST_CASE("oracle agrees with the analytic attenuation") {
  const ModeSystem sys = decoh::build_mode_system(
      subcritical_profile(), ModelSelector::velocity(), 512);
  const EnvironmentState vac = EnvironmentState::vacuum();
  for (double t : {1.0, 5.0, 15.0}) {
    const decoh::ChiComparison c = decoh::oracle_chi(sys, {0.0, 1.0}, t, vac);
    CHECK(c.abs_diff < 5e-6);
    CHECK(c.analytic == doctest::Approx(c.oracle).epsilon(1e-4));
  }
}

TEST_CASE("oracle discretization error shrinks with resolution") {
  const EnvironmentState vac = EnvironmentState::vacuum();
  double prev = 0.0;
  bool first = true;
  for (int n : {64, 128, 256, 512}) {
    const ModeSystem sys = decoh::build_mode_system(
        subcritical_profile(), ModelSelector::velocity(), n);
    const double err =
        decoh::oracle_chi(sys, {0.0, 1.0}, 10.0, vac).abs_diff;
    if (!first) CHECK(err < prev);
    prev = err;
    first = false;
  }
}

TEST_CASE("zero momentum gives exact unity through the oracle") {
  const ModeSystem sys = decoh::build_mode_system(
      subcritical_profile(), ModelSelector::velocity(), 64);
  const decoh::ChiComparison c =
      decoh::oracle_chi(sys, {2.0, 0.0}, 6.0, EnvironmentState::vacuum());
  CHECK(c.oracle == 1.0);
  CHECK(c.analytic == 1.0);
  CHECK(c.abs_diff == 0.0);
}

TEST_CASE("position oracle cross-checks the bordered-operator flow") {
  const ModeSystem sys = decoh::build_mode_system(
      subcritical_profile(), ModelSelector::position(1.0), 96);
  for (double t : {0.8, 3.0}) {
    const decoh::ChiComparison c =
        decoh::oracle_chi(sys, {0.0, 1.0}, t, EnvironmentState::vacuum());
    // Same grid on both sides: the only difference is expm versus the dense
    // eigendecomposition, so agreement is near machine level.
    CHECK(c.abs_diff < 1e-9);
  }
}

TEST_CASE("drift fit recovers the free coefficient without coupling") {
  const ModeSystem sys = decoh::build_mode_system(
      FormFactor::power_law(2.0, 2.0, 0.0), ModelSelector::velocity(), 16);
  const decoh::DriftFit fit = decoh::fit_drift(sys, 1.0, 2.0, 20.0, 12);
  CHECK(fit.alpha_sq == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit.samples == 12);
}

TEST_CASE("drift fit covers the closed-form coefficient") {
  const ModeSystem sys = decoh::build_mode_system(
      subcritical_profile(), ModelSelector::velocity(), 256);
  const decoh::DriftFit fit = decoh::fit_drift(sys, 1.0, 5.0, 25.0, 16);
  CHECK(std::abs(fit.alpha_sq - 0.75) <= std::max(fit.ci_half_width, 1e-4));
}

TEST_CASE("drift fit window validation") {
  const ModeSystem sys = decoh::build_mode_system(
      subcritical_profile(), ModelSelector::velocity(), 16);
  CHECK_THROWS_AS(decoh::fit_drift(sys, 1.0, 2.0, 20.0, 7),
                  decoh::WindowTooShortError);
  CHECK_THROWS_AS(decoh::fit_drift(sys, 1.0, 5.0, 5.0, 12),
                  decoh::WindowTooShortError);
  CHECK_THROWS_AS(decoh::fit_drift(sys, 0.0, 2.0, 20.0, 12),
                  decoh::ConfigError);
  const ModeSystem pos = decoh::build_mode_system(
      subcritical_profile(), ModelSelector::position(1.0), 16);
  CHECK_THROWS_AS(decoh::fit_drift(pos, 1.0, 2.0, 20.0, 12),
                  decoh::ConfigError);
}

TEST_CASE("propagation window guard trips on absurd horizons") {
  const ModeSystem sys = decoh::build_mode_system(
      subcritical_profile(), ModelSelector::velocity(), 16);
  std::mt19937_64 rng(31);
  const Eigen::VectorXd z = random_state(rng, sys.dim());
  CHECK_THROWS_AS(decoh::propagate(sys, z, 1e9), decoh::NumericalError);
}
