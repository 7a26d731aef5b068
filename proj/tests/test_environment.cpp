#include <cmath>
#include <complex>
#include <memory>
#include <random>
#include <vector>

#include "decoh/environment.hpp"
#include "decoh/errors.hpp"
#include "decoh/phase_space.hpp"
#include "doctest.h"

using decoh::EnvironmentState;
using decoh::FieldVector;
using decoh::WeightRole;

namespace {

std::shared_ptr<const std::vector<double>> make_grid(
    std::initializer_list<double> omega) {
  return std::make_shared<const std::vector<double>>(omega);
}

double coth(double x) { return 1.0 / std::tanh(x); }

}  // namespace

TEST_CASE("vacuum exponent is the weighted quarter-sum") {
  const auto g = make_grid({2.0});
  const FieldVector u(g, {3.0}, WeightRole::minus_one);
  const FieldVector v(g, {4.0}, WeightRole::plus_one);
  // 1/4 (u^2 w + v^2 / w) = 1/4 (9 * 2 + 16 / 2) = 6.5.
  CHECK(decoh::decoherence_exponent(u, v, EnvironmentState::vacuum()) ==
        doctest::Approx(6.5).epsilon(1e-15));
  CHECK(decoh::abs_chi_coherent(u, v) ==
        doctest::Approx(std::exp(-6.5)).epsilon(1e-14));
}

TEST_CASE("thermal exponent carries one coth(beta w / 2) per mode") {
  const auto g = make_grid({1.0, 3.0});
  const FieldVector u(g, {1.0, -2.0}, WeightRole::minus_one);
  const FieldVector v(g, {0.5, 1.0}, WeightRole::plus_one);
  const double beta = 0.8;
  const double expected =
      0.25 * (coth(0.5 * beta * 1.0) * (1.0 * 1.0 * 1.0 + 0.5 * 0.5 / 1.0) +
              coth(0.5 * beta * 3.0) * (4.0 * 3.0 + 1.0 / 3.0));
  CHECK(decoh::decoherence_exponent(u, v, EnvironmentState::thermal(beta)) ==
        doctest::Approx(expected).epsilon(1e-14));
  CHECK(decoh::chi_thermal(u, v, beta) ==
        doctest::Approx(std::exp(-expected)).epsilon(1e-13));
}

TEST_CASE("thermal states decohere strictly faster than vacuum") {
  const auto g = make_grid({0.5, 2.0, 8.0});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> val(-1.5, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> uv(3), vv(3);
    for (double& x : uv) x = val(rng);
    for (double& x : vv) x = val(rng);
    const FieldVector u(g, uv, WeightRole::minus_one);
    const FieldVector v(g, vv, WeightRole::plus_one);
    const double vac =
        decoh::decoherence_exponent(u, v, EnvironmentState::vacuum());
    if (vac == 0.0) continue;
    for (double beta : {0.1, 1.0, 10.0}) {
      CHECK(decoh::decoherence_exponent(u, v,
                                        EnvironmentState::thermal(beta)) >
            vac);
    }
  }
}

TEST_CASE("zero temperature limit recovers the vacuum") {
  const auto g = make_grid({0.5, 2.0});
  const FieldVector u(g, {1.0, 0.3}, WeightRole::minus_one);
  const FieldVector v(g, {-0.7, 1.1}, WeightRole::plus_one);
  const double vac =
      decoh::decoherence_exponent(u, v, EnvironmentState::vacuum());
  const double cold =
      decoh::decoherence_exponent(u, v, EnvironmentState::thermal(1e8));
  CHECK(cold == doctest::Approx(vac).epsilon(1e-12));
  CHECK(cold >= vac);  // coth >= 1 always
}

TEST_CASE("inverse temperature must be positive") {
  CHECK_THROWS_AS(EnvironmentState::thermal(0.0),
                  decoh::BetaNonPositiveError);
  CHECK_THROWS_AS(EnvironmentState::thermal(-1.0),
                  decoh::BetaNonPositiveError);
  CHECK(EnvironmentState::thermal(2.0).is_thermal());
  CHECK_FALSE(EnvironmentState::vacuum().is_thermal());
}

TEST_CASE("exponent is additive over modes") {
  const auto g1 = make_grid({1.0});
  const auto g2 = make_grid({4.0});
  const auto g12 = make_grid({1.0, 4.0});
  const FieldVector u1(g1, {0.7}, WeightRole::minus_one);
  const FieldVector v1(g1, {-0.2}, WeightRole::plus_one);
  const FieldVector u2(g2, {1.3}, WeightRole::minus_one);
  const FieldVector v2(g2, {0.9}, WeightRole::plus_one);
  const FieldVector u12(g12, {0.7, 1.3}, WeightRole::minus_one);
  const FieldVector v12(g12, {-0.2, 0.9}, WeightRole::plus_one);
  const EnvironmentState th = EnvironmentState::thermal(0.7);
  CHECK(decoh::decoherence_exponent(u12, v12, th) ==
        doctest::Approx(decoh::decoherence_exponent(u1, v1, th) +
                        decoh::decoherence_exponent(u2, v2, th))
            .epsilon(1e-14));
}

TEST_CASE("coherent expectation keeps the vacuum modulus") {
  const auto g = make_grid({1.0, 2.5});
  const FieldVector u(g, {0.4, -1.0}, WeightRole::minus_one);
  const FieldVector v(g, {1.2, 0.3}, WeightRole::plus_one);
  const std::vector<std::complex<double>> amp{{0.5, -0.3}, {1.0, 2.0}};
  const std::complex<double> chi = decoh::coherent_phase(u, v, amp);
  // The coherent amplitude only rotates the phase, never the modulus.
  CHECK(std::abs(chi) ==
        doctest::Approx(decoh::abs_chi_coherent(u, v)).epsilon(1e-13));
  const std::vector<std::complex<double>> zero{{0.0, 0.0}, {0.0, 0.0}};
  const std::complex<double> plain = decoh::coherent_phase(u, v, zero);
  CHECK(plain.imag() == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(plain.real() ==
        doctest::Approx(decoh::abs_chi_coherent(u, v)).epsilon(1e-13));
}
