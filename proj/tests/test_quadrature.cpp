#include <cmath>
#include <random>
#include <vector>

#include "decoh/quadrature.hpp"
#include "doctest.h"

using decoh::QuadResult;
using decoh::adaptive_gk;

TEST_CASE("single panel is exact on low-degree polynomials") {
  // K15 integrates polynomials up to degree 22 exactly; one panel suffices.
  const auto f = [](double x) { return 3.0 * x * x + 2.0 * x + 1.0; };
  const QuadResult r = adaptive_gk(f, 0.0, 1.0, 1e-14);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("gamma-type integrals match the closed form") {
  // int_0^inf x^2 e^-x dx = Gamma(3) = 2; the truncated tail is < 1e-20.
  const auto f = [](double x) { return x * x * std::exp(-x); };
  const QuadResult r = adaptive_gk(f, 0.0, 60.0, 1e-13);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));

  // Fractional power: int_0^inf x^0.4 e^-x dx = Gamma(1.4).
  const auto g = [](double x) { return std::pow(x, 0.4) * std::exp(-x); };
  const QuadResult s = adaptive_gk(g, 0.0, 60.0, 1e-12);
  CHECK(s.converged);
  CHECK(s.value == doctest::Approx(std::tgamma(1.4)).epsilon(1e-10));
}

TEST_CASE("oscillatory integrands converge under bisection") {
  const double b = 20.0 * std::acos(-1.0);
  const QuadResult r =
      adaptive_gk([](double x) { return std::sin(x); }, 0.0, b, 1e-12, 1e-12);
  CHECK(r.converged);
  CHECK(std::abs(r.value) < 1e-10);

  const QuadResult s = adaptive_gk(
      [](double x) { return std::sin(x) * std::sin(x); }, 0.0, b, 1e-12);
  CHECK(s.converged);
  CHECK(s.value == doctest::Approx(0.5 * b).epsilon(1e-11));
}

TEST_CASE("error estimate bounds the true error") {
  const auto f = [](double x) { return std::exp(-x) * std::cos(7.0 * x); };
  // Closed form: int_0^inf e^-x cos(7x) dx = 1 / (1 + 49).
  const QuadResult r = adaptive_gk(f, 0.0, 50.0, 1e-11);
  CHECK(r.converged);
  CHECK(std::abs(r.value - 1.0 / 50.0) <= std::max(r.abs_error, 1e-13));
}

TEST_CASE("exhausted panel budget reports non-convergence") {
  const auto f = [](double x) { return std::sin(200.0 * x); };
  const QuadResult r = adaptive_gk(f, 0.0, 10.0, 1e-14, 0.0, 2);
  CHECK_FALSE(r.converged);
}

TEST_CASE("empty and reversed ranges integrate to zero") {
  const auto f = [](double x) { return x; };
  CHECK(adaptive_gk(f, 1.0, 1.0, 1e-12).value == 0.0);
  CHECK(adaptive_gk(f, 2.0, 1.0, 1e-12).value == 0.0);
}

TEST_CASE("random polynomials against their antiderivatives") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  std::uniform_real_distribution<double> edge(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    double c[8];
    for (double& x : c) x = coeff(rng);
    double a = edge(rng), b = edge(rng);
    if (a > b) std::swap(a, b);
    if (b - a < 1e-3) continue;
    const auto poly = [&](double x) {
      double acc = 0.0;
      for (int k = 7; k >= 0; --k) acc = acc * x + c[k];
      return acc;
    };
    const auto anti = [&](double x) {
      double acc = 0.0;
      for (int k = 7; k >= 0; --k) acc = acc * x + c[k] / (k + 1);
      return acc * x;
    };
    const QuadResult r = adaptive_gk(poly, a, b, 1e-13);
    CHECK(r.value ==
          doctest::Approx(anti(b) - anti(a)).epsilon(1e-11).scale(1.0));
  }
}

TEST_CASE("repeated evaluation is bit-for-bit identical") {
  const auto f = [](double x) { return std::exp(-x * x) * std::cos(9.0 * x); };
  const QuadResult r1 = adaptive_gk(f, 0.0, 8.0, 1e-12);
  const QuadResult r2 = adaptive_gk(f, 0.0, 8.0, 1e-12);
  CHECK(r1.value == r2.value);
  CHECK(r1.abs_error == r2.abs_error);
}
