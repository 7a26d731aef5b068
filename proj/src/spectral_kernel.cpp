#include "decoh/spectral_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "decoh/errors.hpp"
#include "decoh/quadrature.hpp"

namespace decoh {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMaxOscTime = 1.0e6;

// Small-omega curing power contributed by each kernel: k(x) ~ x^kappa.
int kernel_power(OscKernel k) {
  switch (k) {
    case OscKernel::one_minus_cos: return 2;
    case OscKernel::sin_wt: return 1;
    case OscKernel::one_minus_cos_sq: return 4;
    case OscKernel::sin_sq: return 2;
  }
  return 0;
}

double kernel_max(OscKernel k) {
  switch (k) {
    case OscKernel::one_minus_cos: return 2.0;
    case OscKernel::sin_wt: return 1.0;
    case OscKernel::one_minus_cos_sq: return 4.0;
    case OscKernel::sin_sq: return 1.0;
  }
  return 1.0;
}

double kernel_eval(OscKernel k, double x) {
  switch (k) {
    case OscKernel::one_minus_cos: {
      const double s = std::sin(0.5 * x);
      return 2.0 * s * s;
    }
    case OscKernel::sin_wt:
      return std::sin(x);
    case OscKernel::one_minus_cos_sq: {
      const double s = std::sin(0.5 * x);
      return 4.0 * s * s * s * s;
    }
    case OscKernel::sin_sq: {
      const double s = std::sin(x);
      return s * s;
    }
  }
  return 0.0;
}

// k(x) / x^kappa, bounded and positive on (0, pi].
double kernel_reduced(OscKernel k, double x) {
  if (x == 0.0) {
    switch (k) {
      case OscKernel::one_minus_cos: return 0.5;
      case OscKernel::sin_wt: return 1.0;
      case OscKernel::one_minus_cos_sq: return 0.25;
      case OscKernel::sin_sq: return 1.0;
    }
  }
  const double h = 0.5 * x;
  const double sh = std::sin(h) / h;
  const double sx = std::sin(x) / x;
  switch (k) {
    case OscKernel::one_minus_cos: return 0.5 * sh * sh;
    case OscKernel::sin_wt: return sx;
    case OscKernel::one_minus_cos_sq: return 0.25 * sh * sh * sh * sh;
    case OscKernel::sin_sq: return sx * sx;
  }
  return 0.0;
}

// coth(y) for y > 0, exact limits at both ends.
double coth(double y) { return 1.0 + 2.0 / std::expm1(2.0 * y); }

// y coth(y), extended smoothly through y = 0.
double ycoth(double y) {
  if (y < 1e-8) return 1.0 + y * y / 3.0;
  return y * coth(y);
}

struct PowerLawTerms {
  double amplitude_sq;  // c^2
  double mu;            // 2 / Lambda
  double q;             // 2 sigma + p
};

PowerLawTerms family_terms(const FormFactor& j, double p) {
  return {j.amplitude() * j.amplitude(), 2.0 / j.cutoff(),
          2.0 * j.sigma() + p};
}

// Integrates J(w) w^p k(w t) Theta(w) over [0, W] for the power-law family,
// where the combined small-omega power q_eff = q + kappa - theta lies in
// (-1, inf).  The substitution w = W u^m regularises q_eff in (-1, 0); the
// integrand is assembled in log space so no intermediate over/underflows.
QuadResult small_omega_panel(const PowerLawTerms& f, double W, double t,
                             OscKernel kernel, std::optional<double> beta,
                             double rel_tol) {
  const int kappa = kernel_power(kernel);
  const double theta = beta ? 1.0 : 0.0;
  const double q_eff = f.q + kappa - theta;
  int m = 1;
  if (q_eff < 0.75) {
    m = static_cast<int>(std::ceil(2.0 / (1.0 + q_eff)));
    m = std::clamp(m, 1, 60);
  }
  // ln of the u-independent prefactor.
  double ln_pref = std::log(f.amplitude_sq) + std::log(static_cast<double>(m)) +
                   (q_eff + 1.0) * std::log(W) + kappa * std::log(t);
  if (beta) ln_pref += std::log(2.0 / *beta);
  const double coef = m * (q_eff + 1.0);  // coefficient of ln u, >= 1
  auto integrand = [&](double u) -> double {
    if (u <= 0.0) return 0.0;
    const double lnu = std::log(u);
    const double w = W * std::exp(m * lnu);
    double ln_mag = ln_pref + (coef - 1.0) * lnu - f.mu * w;
    const double kr = kernel_reduced(kernel, w * t);
    if (!(kr > 0.0)) return 0.0;
    ln_mag += std::log(kr);
    if (beta) ln_mag += std::log(ycoth(0.5 * *beta * w));
    return std::exp(ln_mag);
  };
  return adaptive_gk(integrand, 0.0, 1.0, rel_tol, 0.0, 4000);
}

// One oscillation period integrated with bounded-depth bisection.
template <class F>
void period_integral(const F& f, double a, double b, double tol, int depth,
                     double& value, double& error) {
  double v, e, ra;
  gk::panel(f, a, b, v, e, ra);
  if (e <= tol || depth >= 9 || b - a < 1e-14 * (std::abs(a) + 1.0)) {
    value += v;
    error += e;
    return;
  }
  const double m2 = 0.5 * (a + b);
  period_integral(f, a, m2, 0.5 * tol, depth + 1, value, error);
  period_integral(f, m2, b, 0.5 * tol, depth + 1, value, error);
}

void check_beta(const std::optional<double>& beta) {
  if (beta && !(*beta > 0.0))
    throw BetaNonPositiveError("thermal weighting requires beta > 0");
}

}  // namespace

WeightedIntegral weighted_norm_sq(const FormFactor& j, double p) {
  WeightedIntegral out;
  if (j.is_power_law()) {
    const PowerLawTerms f = family_terms(j, p);
    if (!(f.q > -1.0))
      throw IrDivergentError(
          "int J w^p diverges at omega -> 0 (needs 2 sigma + p > -1)");
    if (f.amplitude_sq == 0.0) return {0.0, 0.0, true};
    // Split at the cutoff scale; substitute below it when the power is
    // negative, integrate the smooth decaying part directly above.
    const double split = std::min(1.0 / f.mu, j.support_max());
    double upper = std::max(j.support_max(), split * 2.0);
    const double scale_guess = j.family_weighted_integral(p);
    while (std::exp(f.q * std::log(upper) - f.mu * upper) / f.mu >
           1e-16 * scale_guess)
      upper *= 1.25;
    int m = 1;
    if (f.q < 0.75)
      m = std::clamp(static_cast<int>(std::ceil(2.0 / (1.0 + f.q))), 1, 60);
    const double coef = m * (f.q + 1.0);
    const double ln_pref = std::log(f.amplitude_sq) +
                           std::log(static_cast<double>(m)) +
                           (f.q + 1.0) * std::log(split);
    auto low = [&](double u) -> double {
      if (u <= 0.0) return 0.0;
      const double lnu = std::log(u);
      const double w = split * std::exp(m * lnu);
      return std::exp(ln_pref + (coef - 1.0) * lnu - f.mu * w);
    };
    auto high = [&](double w) -> double {
      return f.amplitude_sq * std::exp(f.q * std::log(w) - f.mu * w);
    };
    const QuadResult lo = adaptive_gk(low, 0.0, 1.0, 5e-14, 0.0, 4000);
    const QuadResult hi = adaptive_gk(high, split, upper, 5e-14, 0.0, 8000);
    out.value = lo.value + hi.value;
    out.abs_error = lo.abs_error + hi.abs_error;
    out.converged = lo.converged && hi.converged;
    return out;
  }
  const auto& w = j.table_omega();
  auto f = [&](double x) { return j(x) * std::exp(p * std::log(x)); };
  for (std::size_t i = 1; i < w.size(); ++i) {
    const QuadResult r = adaptive_gk(f, w[i - 1], w[i], 1e-13, 0.0, 64);
    out.value += r.value;
    out.abs_error += r.abs_error;
  }
  out.converged = true;
  return out;
}

IrClass ir_classify(const FormFactor& j) {
  if (j.is_power_law())
    return j.sigma() > 1.0 ? IrClass::regular : IrClass::ir_divergent;
  const FormFactor::SmallOmegaFit fit = j.small_omega_exponent();
  // int w^(s-3) converges at 0 iff s > 2.
  if (fit.exponent - 2.0 * fit.uncertainty > 2.0) return IrClass::regular;
  if (fit.exponent + 2.0 * fit.uncertainty < 2.0) return IrClass::ir_divergent;
  throw IndeterminateError(
      "small-omega slope estimate too uncertain to classify");
}

WeightedIntegral oscillatory_integral(const FormFactor& j, double p, double t,
                                      OscKernel kernel,
                                      std::optional<double> beta) {
  check_beta(beta);
  if (std::abs(t) > kMaxOscTime)
    throw OscillationOverflowError(
        "oscillatory evaluation supported for |t| <= 1e6");
  // Odd kernels flip sign under t -> -t; even kernels are symmetric.
  double sign = 1.0;
  if (t < 0.0) {
    if (kernel == OscKernel::sin_wt) sign = -1.0;
    t = -t;
  }
  if (t == 0.0) return {0.0, 0.0, true};

  const double rel_tol = 1e-11;
  WeightedIntegral out;

  if (j.is_power_law()) {
    const PowerLawTerms f = family_terms(j, p);
    const double q_eff =
        f.q + kernel_power(kernel) - (beta ? 1.0 : 0.0);
    if (!(q_eff > -1.0))
      throw IrDivergentError(
          "oscillatory integrand diverges at omega -> 0 after kernel curing");
    if (f.amplitude_sq == 0.0) return {0.0, 0.0, true};

    const double W = std::min(kPi / t, 4.0 * j.support_max());
    const QuadResult head =
        small_omega_panel(f, W, t, kernel, beta, 0.5 * rel_tol);
    out.value = head.value;
    out.abs_error = head.abs_error;
    bool ok = head.converged;

    if (W < 4.0 * j.support_max()) {
      auto body = [&](double w) -> double {
        double v = f.amplitude_sq *
                   std::exp(f.q * std::log(w) - f.mu * w) *
                   kernel_eval(kernel, w * t);
        if (beta) v *= coth(0.5 * *beta * w);
        return v;
      };
      const double period = 2.0 * kPi / t;
      const double kmax = kernel_max(kernel);
      double acc = 0.0, comp = 0.0, err = 0.0;
      double a = W;
      const long max_periods = 80000000L;
      for (long k = 0; k < max_periods; ++k) {
        const double b = a + period;
        double pv = 0.0, pe = 0.0;
        period_integral(body, a, b, 1e-13 * (std::abs(acc) + 1e-30), 0, pv,
                        pe);
        const double y = pv - comp;
        const double s = acc + y;
        comp = (s - acc) - y;
        acc = s;
        err += pe;
        a = b;
        // Exponential-tail truncation: remaining mass below 1e-14 of what has
        // accumulated so far (head panel included).
        double thcap = beta ? coth(0.5 * *beta * a) : 1.0;
        double wpow = (p <= 0.0) ? std::exp(p * std::log(a))
                                 : std::exp(p * std::log(j.support_max() * 4));
        const double tail = kmax * thcap * wpow * j.tail_mass_bound(a);
        const double scale =
            std::max(std::abs(out.value + acc), std::abs(acc));
        if (tail < 1e-14 * std::max(scale, 1e-280)) break;
        if (k + 1 == max_periods) ok = false;
      }
      out.value += acc;
      out.abs_error += err;
    }
    out.converged = ok;
    out.value *= sign;
    return out;
  }

  // Tabulated profile: support is [w1, wN]; integrate table panels, splitting
  // panels wider than half an oscillation period.
  const auto& w = j.table_omega();
  auto f = [&](double x) -> double {
    double v = j(x) * std::exp(p * std::log(x)) * kernel_eval(kernel, x * t);
    if (beta) v *= coth(0.5 * *beta * x);
    return v;
  };
  const double period = 2.0 * kPi / t;
  double acc = 0.0, err = 0.0;
  for (std::size_t i = 1; i < w.size(); ++i) {
    const double a = w[i - 1], b = w[i];
    const int nsplit =
        std::max(1, static_cast<int>(std::ceil((b - a) / (0.5 * period))));
    for (int s = 0; s < nsplit; ++s) {
      const double sa = a + (b - a) * s / nsplit;
      const double sb = a + (b - a) * (s + 1) / nsplit;
      double pv = 0.0, pe = 0.0;
      period_integral(f, sa, sb, 1e-13 * (std::abs(acc) + 1e-30), 0, pv, pe);
      acc += pv;
      err += pe;
    }
  }
  out.value = sign * acc;
  out.abs_error = err;
  out.converged = true;
  return out;
}

Boundedness boundedness_check(const FormFactor& j,
                              const ModelSelector& model) {
  double threshold = 1.0;
  if (model.kind == ModelSelector::Kind::position) {
    if (!(model.omega0 > 0.0))
      throw ConfigError("position coupling threshold requires omega0 > 0");
    threshold = model.omega0 * model.omega0;
  }
  const WeightedIntegral norm = weighted_norm_sq(j, -2.0);
  if (!norm.converged)
    throw NumericalError("coupling norm quadrature did not converge");
  const double tol = 1e-12 * std::max(1.0, threshold);
  if (std::abs(norm.value - threshold) <= tol) return Boundedness::critical;
  return norm.value < threshold ? Boundedness::subcritical
                                : Boundedness::supercritical;
}

const char* to_string(Boundedness b) {
  switch (b) {
    case Boundedness::subcritical: return "subcritical";
    case Boundedness::critical: return "critical";
    case Boundedness::supercritical: return "supercritical";
  }
  return "?";
}

const char* to_string(IrClass c) {
  return c == IrClass::regular ? "regular" : "ir_divergent";
}

}  // namespace decoh
