#include "decoh/velocity_model.hpp"

#include <algorithm>
#include <cmath>

#include "decoh/errors.hpp"
#include "json.hpp"

namespace decoh {

VelocityModel::VelocityModel(FormFactor j, Options opts) : j_(std::move(j)) {
  boundedness_ = boundedness_check(j_, ModelSelector::velocity());
  if (boundedness_ == Boundedness::supercritical)
    throw UnboundedError(
        "velocity coupling norm exceeds 1; the Hamiltonian is unbounded "
        "below");
  coupling_norm_sq_ = weighted_norm_sq(j_, -2.0).value;
  if (opts.alpha_sq) {
    alpha_sq_ = *opts.alpha_sq;
  } else {
    alpha_sq_ =
        boundedness_ == Boundedness::critical ? 0.0 : 1.0 - coupling_norm_sq_;
  }
  if (alpha_sq_ < 0.0 || alpha_sq_ > 1.0)
    throw ConfigError("drift coefficient must lie in [0, 1]");
  const GridScheme scheme = opts.scheme ? *opts.scheme : default_scheme(j_);
  grid_ = make_field_grid(j_, opts.grid_modes, scheme);
}

PhasePoint VelocityModel::flow(const WeylLabel& l, double t) const {
  PhasePoint p;
  p.b = l.b;
  if (l.b == 0.0 || t == 0.0) {
    p.a = l.a;
    p.u = FieldVector::zeros(grid_.shared_omega(), WeightRole::minus_one);
    p.v = FieldVector::zeros(grid_.shared_omega(), WeightRole::plus_one);
    return p;
  }
  const WeightedIntegral drift =
      oscillatory_integral(j_, -3.0, t, OscKernel::sin_wt);
  if (!drift.converged)
    throw NumericalError("drift integral did not converge");
  p.a = l.a + l.b * drift.value + alpha_sq_ * l.b * t;
  const auto& w = grid_.omega();
  const auto& g = grid_.coupling();
  std::vector<double> u(w.size()), v(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double s = std::sin(0.5 * w[i] * t);
    u[i] = l.b * g[i] * 2.0 * s * s / (w[i] * w[i]);
    v[i] = l.b * g[i] * std::sin(w[i] * t) / w[i];
  }
  p.u = FieldVector(grid_.shared_omega(), std::move(u), WeightRole::minus_one);
  p.v = FieldVector(grid_.shared_omega(), std::move(v), WeightRole::plus_one);
  return p;
}

double VelocityModel::exponent(double b, double t,
                               const EnvironmentState& env) const {
  if (b == 0.0 || t == 0.0) return 0.0;
  std::optional<double> beta;
  if (env.is_thermal()) beta = env.beta;
  const WeightedIntegral i =
      oscillatory_integral(j_, -3.0, t, OscKernel::one_minus_cos, beta);
  if (!i.converged)
    throw NumericalError("decoherence integral did not converge");
  return 0.5 * b * b * i.value;
}

double VelocityModel::phi(double t) const {
  return exponent(1.0, t, EnvironmentState::vacuum());
}

std::vector<double> VelocityModel::phi_envelope(
    const std::vector<double>& times, Exec exec) const {
  std::vector<double> phi_t(times.size());
  parallel_for(static_cast<std::int64_t>(times.size()), exec,
               [&](std::int64_t i) { phi_t[i] = phi(times[i]); });
  // Forward minimum: phi~(t_k) = min over s >= t_k on the grid.
  for (std::size_t i = phi_t.size(); i-- > 1;)
    phi_t[i - 1] = std::min(phi_t[i - 1], phi_t[i]);
  return phi_t;
}

VelocityModel::Reduced VelocityModel::reduced_weyl(
    const WeylLabel& l, double t, const EnvironmentState& env) const {
  if (l.b == 0.0) return {l, 1.0};
  const PhasePoint p = flow(l, t);
  return {{p.a, p.b}, std::exp(-exponent(l.b, t, env))};
}

DecoherenceCurve VelocityModel::sample_curve(const WeylLabel& l,
                                             const std::vector<double>& times,
                                             const EnvironmentState& env,
                                             Exec exec) const {
  DecoherenceCurve c;
  const std::size_t n = times.size();
  c.t = times;
  c.a_t.resize(n);
  c.b_t.resize(n);
  c.abs_chi.resize(n);
  c.exponent.resize(n);
  c.envelope_phi.resize(n);
  parallel_for(static_cast<std::int64_t>(n), exec, [&](std::int64_t i) {
    const double t = times[i];
    c.b_t[i] = l.b;
    if (l.b == 0.0 || t == 0.0) {
      c.a_t[i] = l.a;
      c.exponent[i] = 0.0;
    } else {
      const WeightedIntegral drift =
          oscillatory_integral(j_, -3.0, t, OscKernel::sin_wt);
      if (!drift.converged)
        throw NumericalError("drift integral did not converge");
      c.a_t[i] = l.a + l.b * drift.value + alpha_sq_ * l.b * t;
      c.exponent[i] = exponent(l.b, t, env);
    }
    c.abs_chi[i] = std::exp(-c.exponent[i]);
    c.envelope_phi[i] = phi(t);
  });
  for (std::size_t i = n; i-- > 1;)
    c.envelope_phi[i - 1] = std::min(c.envelope_phi[i - 1], c.envelope_phi[i]);

  nlohmann::json meta;
  meta["model"] = "velocity";
  if (j_.is_power_law()) {
    meta["form_factor"] = {{"family", "power_law"},
                           {"sigma", j_.sigma()},
                           {"cutoff", j_.cutoff()},
                           {"amplitude", j_.amplitude()}};
  } else {
    meta["form_factor"] = {{"family", "tabulated"},
                           {"rows", j_.table_omega().size()}};
  }
  meta["coupling_norm_sq"] = coupling_norm_sq_;
  meta["boundedness"] = to_string(boundedness_);
  meta["alpha_sq"] = alpha_sq_;
  meta["drift_frozen"] = (alpha_sq_ == 0.0);
  meta["environment"] =
      env.is_thermal()
          ? nlohmann::json{{"kind", "thermal"}, {"beta", env.beta}}
          : nlohmann::json{{"kind", "vacuum"}};
  meta["label"] = {{"a", l.a}, {"b", l.b}};
  meta["grid_modes"] = grid_.size();
  c.metadata_json = meta.dump();
  return c;
}

}  // namespace decoh
