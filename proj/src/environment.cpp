#include "decoh/environment.hpp"

#include <cmath>

#include "decoh/errors.hpp"

namespace decoh {

namespace {

double coth(double y) { return 1.0 + 2.0 / std::expm1(2.0 * y); }

void check_pair(const FieldVector& u, const FieldVector& v) {
  if (!u.same_grid(v))
    throw GridMismatchError("expectation needs u and v on one grid");
  if (u.role() != WeightRole::minus_one || v.role() != WeightRole::plus_one)
    throw ConfigError("expectation expects (u, v) with roles (-1, +1)");
}

}  // namespace

EnvironmentState EnvironmentState::thermal(double beta) {
  if (!(beta > 0.0))
    throw BetaNonPositiveError("thermal state requires beta > 0");
  return {Kind::thermal, beta};
}

double decoherence_exponent(const FieldVector& u, const FieldVector& v,
                            const EnvironmentState& env) {
  check_pair(u, v);
  if (env.is_thermal() && !(env.beta > 0.0))
    throw BetaNonPositiveError("thermal exponent requires beta > 0");
  const auto& w = u.omega();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double mode = u.values()[i] * u.values()[i] * w[i] +
                  v.values()[i] * v.values()[i] / w[i];
    if (env.is_thermal()) mode *= coth(0.5 * env.beta * w[i]);
    s += mode;
  }
  return 0.25 * s;
}

double abs_chi_coherent(const FieldVector& u, const FieldVector& v) {
  return std::exp(-decoherence_exponent(u, v, EnvironmentState::vacuum()));
}

double chi_thermal(const FieldVector& u, const FieldVector& v, double beta) {
  return std::exp(
      -decoherence_exponent(u, v, EnvironmentState::thermal(beta)));
}

std::complex<double> coherent_phase(
    const FieldVector& u, const FieldVector& v,
    const std::vector<std::complex<double>>& g) {
  check_pair(u, v);
  if (g.size() != u.size())
    throw GridMismatchError("coherent amplitude length differs from grid");
  const auto& w = u.omega();
  double phase = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    // Im of conj(sqrt(w) u_i + i v_i / sqrt(w)) g_i.
    const double rw = std::sqrt(w[i]);
    phase += rw * u.values()[i] * g[i].imag() -
             v.values()[i] / rw * g[i].real();
  }
  const double mod = abs_chi_coherent(u, v);
  return std::polar(mod, phase);
}

}  // namespace decoh
