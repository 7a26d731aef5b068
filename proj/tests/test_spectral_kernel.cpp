#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "decoh/errors.hpp"
#include "decoh/form_factor.hpp"
#include "decoh/quadrature.hpp"
#include "decoh/spectral_kernel.hpp"
#include "doctest.h"

using decoh::Boundedness;
using decoh::FormFactor;
using decoh::IrClass;
using decoh::ModelSelector;
using decoh::OscKernel;
using decoh::WeightedIntegral;

namespace {

// Reference profile J(w) = w^2 e^-w: sigma = 1, cutoff 2, amplitude 1.
FormFactor reference() { return FormFactor::power_law(1.0, 2.0, 1.0); }

// Laplace-transform closed forms for int_0^inf w^q e^(-mu w) k(w t) dw,
// evaluated through complex powers — an independent route sharing no code
// with the library's quadrature.
double cos_moment(double q, double mu, double t) {
  const std::complex<double> z(mu, -t);
  return std::tgamma(q + 1.0) * std::real(std::pow(z, -(q + 1.0)));
}

double sin_moment(double q, double mu, double t) {
  const std::complex<double> z(mu, -t);
  return std::tgamma(q + 1.0) * std::imag(std::pow(z, -(q + 1.0)));
}

double one_minus_cos_moment(double q, double mu, double t) {
  return std::tgamma(q + 1.0) * std::pow(mu, -(q + 1.0)) - cos_moment(q, mu, t);
}

}  // namespace

TEST_CASE("weighted norms of the reference profile") {
  const FormFactor j = reference();
  // int w^2 e^-w w^-2 = 1: the coupling norm sits exactly at threshold.
  WeightedIntegral n = decoh::weighted_norm_sq(j, -2.0);
  CHECK(n.converged);
  CHECK(n.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(decoh::weighted_norm_sq(j, -1.0).value ==
        doctest::Approx(1.0).epsilon(1e-12));  // Gamma(2)
  CHECK(decoh::weighted_norm_sq(j, 0.0).value ==
        doctest::Approx(2.0).epsilon(1e-12));  // Gamma(3)
  CHECK(decoh::weighted_norm_sq(j, 2.0).value ==
        doctest::Approx(24.0).epsilon(1e-12));  // Gamma(5)
  CHECK_THROWS_AS(decoh::weighted_norm_sq(j, -3.0), decoh::IrDivergentError);
}

TEST_CASE("log attenuation closed form: half log(1 + t^2)") {
  const FormFactor j = reference();
  for (double t : {0.25, 0.5, 1.0, 3.0, 10.0, 100.0, 1e4}) {
    const WeightedIntegral r =
        decoh::oscillatory_integral(j, -3.0, t, OscKernel::one_minus_cos);
    CHECK(r.converged);
    CHECK(r.value ==
          doctest::Approx(0.5 * std::log1p(t * t)).epsilon(1e-9));
  }
}

TEST_CASE("drift kernel closed form: arctan t") {
  const FormFactor j = reference();
  for (double t : {0.1, 1.0, 2.0, 10.0, 1000.0}) {
    const WeightedIntegral r =
        decoh::oscillatory_integral(j, -3.0, t, OscKernel::sin_wt);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(std::atan(t)).epsilon(1e-9));
  }
}

TEST_CASE("first-moment kernels of the reference profile") {
  // int w e^-w (1 - cos w t) dw = 1 - (1 - t^2) / (1 + t^2)^2 and
  // int w e^-w sin(w t) dw = 2 t / (1 + t^2)^2.
  const FormFactor j = reference();
  for (double t : {0.3, 1.0, 4.0, 20.0}) {
    const double d = 1.0 + t * t;
    CHECK(decoh::oscillatory_integral(j, -1.0, t, OscKernel::one_minus_cos)
              .value ==
          doctest::Approx(1.0 - (1.0 - t * t) / (d * d)).epsilon(1e-9));
    CHECK(decoh::oscillatory_integral(j, -1.0, t, OscKernel::sin_wt).value ==
          doctest::Approx(2.0 * t / (d * d)).epsilon(1e-9));
  }
}

TEST_CASE("oscillatory integrals against complex-power closed forms") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> sig(0.7, 2.5);
  std::uniform_real_distribution<double> cut(0.8, 3.0);
  std::uniform_real_distribution<double> time(0.05, 50.0);
  for (int trial = 0; trial < 60; ++trial) {
    const double sigma = sig(rng), cutoff = cut(rng), t = time(rng);
    const FormFactor j = FormFactor::power_law(sigma, cutoff, 1.0);
    const double p = (trial % 2 == 0) ? -1.0 : 0.0;
    const double q = 2.0 * sigma + p;
    const double mu = 2.0 / cutoff;
    CHECK(decoh::oscillatory_integral(j, p, t, OscKernel::one_minus_cos)
              .value ==
          doctest::Approx(one_minus_cos_moment(q, mu, t))
              .epsilon(1e-8)
              .scale(1.0));
    CHECK(decoh::oscillatory_integral(j, p, t, OscKernel::sin_wt).value ==
          doctest::Approx(sin_moment(q, mu, t)).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("kernel identity: (1-cos)^2 + sin^2 = 2 (1-cos)") {
  const FormFactor j = FormFactor::power_law(1.5, 2.0, 0.7);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> time(0.1, 30.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double t = time(rng);
    const double sq =
        decoh::oscillatory_integral(j, -2.0, t, OscKernel::one_minus_cos_sq)
            .value +
        decoh::oscillatory_integral(j, -2.0, t, OscKernel::sin_sq).value;
    const double lin =
        decoh::oscillatory_integral(j, -2.0, t, OscKernel::one_minus_cos)
            .value;
    CHECK(sq == doctest::Approx(2.0 * lin).epsilon(1e-8));
  }
}

TEST_CASE("time symmetry of the kernels") {
  const FormFactor j = reference();
  const double t = 3.7;
  CHECK(decoh::oscillatory_integral(j, -3.0, -t, OscKernel::sin_wt).value ==
        -decoh::oscillatory_integral(j, -3.0, t, OscKernel::sin_wt).value);
  CHECK(decoh::oscillatory_integral(j, -3.0, -t, OscKernel::one_minus_cos)
            .value ==
        decoh::oscillatory_integral(j, -3.0, t, OscKernel::one_minus_cos)
            .value);
  CHECK(decoh::oscillatory_integral(j, -3.0, 0.0, OscKernel::one_minus_cos)
            .value == 0.0);
}

TEST_CASE("supported oscillation range") {
  const FormFactor j = reference();
  CHECK_THROWS_AS(decoh::oscillatory_integral(j, -3.0, 1.0000001e6,
                                              OscKernel::one_minus_cos),
                  decoh::OscillationOverflowError);
  const WeightedIntegral r =
      decoh::oscillatory_integral(j, -3.0, 1e6, OscKernel::one_minus_cos);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(0.5 * std::log1p(1e12)).epsilon(1e-7));
}

TEST_CASE("thermal weighting against brute-force quadrature") {
  const FormFactor j = FormFactor::power_law_with_norm(2.0, 2.0, 0.25);
  const double beta = 1.0, t = 2.5;
  const auto brute = [&](double w) {
    return j(w) * std::pow(w, -3.0) * (1.0 - std::cos(w * t)) /
           std::tanh(0.5 * beta * w);
  };
  const decoh::QuadResult ref =
      decoh::adaptive_gk(brute, 0.0, j.support_max(), 1e-12);
  CHECK(ref.converged);
  const WeightedIntegral r = decoh::oscillatory_integral(
      j, -3.0, t, OscKernel::one_minus_cos, beta);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(ref.value).epsilon(1e-8));
}

TEST_CASE("thermal weighting strictly enlarges the integral") {
  const FormFactor j = FormFactor::power_law_with_norm(2.0, 2.0, 0.25);
  const double t = 4.0;
  const double vac =
      decoh::oscillatory_integral(j, -3.0, t, OscKernel::one_minus_cos).value;
  double prev = std::numeric_limits<double>::infinity();
  for (double beta : {0.1, 1.0, 10.0}) {
    const double th =
        decoh::oscillatory_integral(j, -3.0, t, OscKernel::one_minus_cos, beta)
            .value;
    CHECK(th > vac);
    CHECK(th < prev);  // hotter baths decohere faster
    prev = th;
  }
  // beta -> infinity recovers the vacuum value.
  const double cold =
      decoh::oscillatory_integral(j, -3.0, t, OscKernel::one_minus_cos, 1e8)
          .value;
  CHECK(cold == doctest::Approx(vac).epsilon(1e-12));
  CHECK_THROWS_AS(
      decoh::oscillatory_integral(j, -3.0, t, OscKernel::one_minus_cos, 0.0),
      decoh::BetaNonPositiveError);
  CHECK_THROWS_AS(
      decoh::oscillatory_integral(j, -3.0, t, OscKernel::one_minus_cos, -2.0),
      decoh::BetaNonPositiveError);
}

TEST_CASE("tabulated profiles feed the same oscillatory kernels") {
  // Dense log-spaced table of w^2 e^-w; tolerance reflects interpolation.
  const int n = 2000;
  std::vector<double> w(n), v(n);
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    w[i] = 1e-5 * std::pow(40.0 / 1e-5, s);
    v[i] = w[i] * w[i] * std::exp(-w[i]);
  }
  const FormFactor j = FormFactor::tabulated(std::move(w), std::move(v));
  for (double t : {0.5, 2.0, 8.0}) {
    const WeightedIntegral r =
        decoh::oscillatory_integral(j, -3.0, t, OscKernel::one_minus_cos);
    CHECK(r.value == doctest::Approx(0.5 * std::log1p(t * t)).epsilon(2e-4));
  }
}

TEST_CASE("infrared classification of the power-law family") {
  for (double sigma : {0.6, 0.8, 1.0}) {
    CHECK(decoh::ir_classify(FormFactor::power_law(sigma, 2.0, 1.0)) ==
          IrClass::ir_divergent);
  }
  for (double sigma : {1.0000001, 1.2, 2.0}) {
    CHECK(decoh::ir_classify(FormFactor::power_law(sigma, 2.0, 1.0)) ==
          IrClass::regular);
  }
}

TEST_CASE("infrared classification of tabulated profiles") {
  const auto table_from = [](double expnt) {
    const int n = 300;
    std::vector<double> w(n), v(n);
    for (int i = 0; i < n; ++i) {
      const double s = static_cast<double>(i) / (n - 1);
      w[i] = 1e-4 * std::pow(30.0 / 1e-4, s);
      v[i] = std::pow(w[i], expnt) * std::exp(-w[i]);
    }
    return FormFactor::tabulated(std::move(w), std::move(v));
  };
  CHECK(decoh::ir_classify(table_from(2.5)) == IrClass::regular);
  CHECK(decoh::ir_classify(table_from(1.5)) == IrClass::ir_divergent);
  // Borderline slope with strong scatter: neither side of the threshold is
  // statistically resolved, so no classification is possible.
  std::vector<double> w{1e-4, 2e-4, 4e-4, 1e-3, 1e-2, 0.1, 1.0, 2.0, 30.0};
  std::vector<double> v;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double jitter = (i % 2 == 0) ? 1.5 : 0.5;
    v.push_back(w[i] * w[i] * jitter);
  }
  v.back() = 1e-12;  // decaying tail so the table passes validation
  CHECK_THROWS_AS(decoh::ir_classify(FormFactor::tabulated(w, v)),
                  decoh::IndeterminateError);
}

TEST_CASE("boundedness thresholds for both couplings") {
  const auto with_norm = [](double norm) {
    return FormFactor::power_law_with_norm(2.0, 2.0, norm);
  };
  CHECK(decoh::boundedness_check(with_norm(0.5), ModelSelector::velocity()) ==
        Boundedness::subcritical);
  CHECK(decoh::boundedness_check(with_norm(1.0), ModelSelector::velocity()) ==
        Boundedness::critical);
  CHECK(decoh::boundedness_check(with_norm(1.5), ModelSelector::velocity()) ==
        Boundedness::supercritical);
  // The reference profile has coupling norm exactly 1.
  CHECK(decoh::boundedness_check(reference(), ModelSelector::velocity()) ==
        Boundedness::critical);
  // Position coupling compares against omega0^2.
  CHECK(decoh::boundedness_check(with_norm(0.25),
                                 ModelSelector::position(1.0)) ==
        Boundedness::subcritical);
  CHECK(decoh::boundedness_check(with_norm(0.25),
                                 ModelSelector::position(0.5)) ==
        Boundedness::critical);
  CHECK(decoh::boundedness_check(with_norm(0.25),
                                 ModelSelector::position(0.4)) ==
        Boundedness::supercritical);
  CHECK_THROWS_AS(
      decoh::boundedness_check(with_norm(0.25), ModelSelector::position(0.0)),
      decoh::ConfigError);
}
