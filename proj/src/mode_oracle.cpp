#include "decoh/mode_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "decoh/errors.hpp"
#include "decoh/position_model.hpp"

namespace decoh {
namespace {

// Max balanced step size for the truncated Taylor expansion; with ||h S|| <= 2
// thirty terms reach full double precision with a wide margin.
constexpr double kStepTheta = 2.0;
constexpr int kTaylorTerms = 30;
constexpr std::int64_t kMaxSteps = 2'000'000;

double student95(int df) {
  static constexpr double table[30] = {
      12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
      2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
      2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (df < 1) return table[0];
  if (df <= 30) return table[df - 1];
  if (df <= 60) return 2.000;
  if (df <= 120) return 1.980;
  return 1.960;
}

double max_abs_col_sum(const Eigen::SparseMatrix<double>& m) {
  double best = 0.0;
  for (int k = 0; k < m.outerSize(); ++k) {
    double s = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

ModeSystem build_mode_system(const FormFactor& j, const ModelSelector& kind,
                             int modes, std::optional<GridScheme> scheme) {
  if (modes < 1) throw ConfigError("mode count must be at least 1");
  ModeSystem sys;
  sys.kind = kind;
  sys.profile = j;
  sys.scheme = scheme ? *scheme : default_scheme(j);
  sys.grid = make_field_grid(j, modes, sys.scheme);

  const std::size_t n = sys.grid.size();
  const Eigen::Index m = static_cast<Eigen::Index>(n) + 1;  // particle + modes
  const Eigen::Index dim = 2 * m;
  const std::vector<double>& w = sys.grid.omega();
  const std::vector<double>& g = sys.grid.coupling();

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * n + 4);
  const Eigen::Index ia = 0, ib = m;
  const auto iu = [&](std::size_t i) {
    return static_cast<Eigen::Index>(i) + 1;
  };
  const auto iv = [&](std::size_t i) {
    return m + static_cast<Eigen::Index>(i) + 1;
  };

  if (kind.kind == ModelSelector::Kind::velocity) {
    // da/dt = b - sum_i g_i u_i, db/dt = 0,
    // du_i/dt = v_i, dv_i/dt = -w_i^2 u_i + g_i b.
    trip.emplace_back(ia, ib, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      trip.emplace_back(ia, iu(i), -g[i]);
      trip.emplace_back(iu(i), iv(i), 1.0);
      trip.emplace_back(iv(i), iu(i), -w[i] * w[i]);
      trip.emplace_back(iv(i), ib, g[i]);
    }
  } else {
    // da/dt = b, db/dt = -w0^2 a - sum_i g_i u_i,
    // du_i/dt = v_i, dv_i/dt = -g_i a - w_i^2 u_i.
    const double w0 = kind.omega0;
    trip.emplace_back(ia, ib, 1.0);
    trip.emplace_back(ib, ia, -w0 * w0);
    for (std::size_t i = 0; i < n; ++i) {
      trip.emplace_back(ib, iu(i), -g[i]);
      trip.emplace_back(iu(i), iv(i), 1.0);
      trip.emplace_back(iv(i), ia, -g[i]);
      trip.emplace_back(iv(i), iu(i), -w[i] * w[i]);
    }
  }
  sys.generator.resize(dim, dim);
  sys.generator.setFromTriplets(trip.begin(), trip.end());
  sys.generator.makeCompressed();

  // Balanced coordinates: sqrt(w) on the u block, 1/sqrt(w) on the v block
  // (and the analogous particle pair for the position kind), which brings
  // every entry down to O(w) instead of O(w^2).
  sys.balance = Eigen::VectorXd::Ones(dim);
  if (kind.kind == ModelSelector::Kind::position && kind.omega0 > 0.0) {
    sys.balance[ia] = std::sqrt(kind.omega0);
    sys.balance[ib] = 1.0 / std::sqrt(kind.omega0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    sys.balance[iu(i)] = std::sqrt(w[i]);
    sys.balance[iv(i)] = 1.0 / std::sqrt(w[i]);
  }
  sys.generator_balanced = sys.balance.asDiagonal() * sys.generator *
                           sys.balance.cwiseInverse().asDiagonal();
  sys.generator_balanced.makeCompressed();
  sys.balanced_norm1 = max_abs_col_sum(sys.generator_balanced);
  return sys;
}

Eigen::VectorXd pack(const ModeSystem& sys, const PhasePoint& p) {
  const std::size_t n = sys.modes();
  if (p.u.size() != n || p.v.size() != n || p.u.omega() != sys.grid.omega())
    throw GridMismatchError("phase point does not live on the system grid");
  const Eigen::Index m = static_cast<Eigen::Index>(n) + 1;
  Eigen::VectorXd z(2 * m);
  z[0] = p.a;
  z[m] = p.b;
  for (std::size_t i = 0; i < n; ++i) {
    z[static_cast<Eigen::Index>(i) + 1] = p.u.values()[i];
    z[m + static_cast<Eigen::Index>(i) + 1] = p.v.values()[i];
  }
  return z;
}

PhasePoint unpack(const ModeSystem& sys, const Eigen::VectorXd& z) {
  const std::size_t n = sys.modes();
  const Eigen::Index m = static_cast<Eigen::Index>(n) + 1;
  if (z.size() != 2 * m)
    throw GridMismatchError("flat vector does not match the system dimension");
  PhasePoint p;
  p.a = z[0];
  p.b = z[m];
  std::vector<double> uv(n), vv(n);
  for (std::size_t i = 0; i < n; ++i) {
    uv[i] = z[static_cast<Eigen::Index>(i) + 1];
    vv[i] = z[m + static_cast<Eigen::Index>(i) + 1];
  }
  p.u = FieldVector(sys.grid.shared_omega(), std::move(uv),
                    WeightRole::minus_one);
  p.v = FieldVector(sys.grid.shared_omega(), std::move(vv),
                    WeightRole::plus_one);
  return p;
}

Eigen::VectorXd propagate(const ModeSystem& sys, const Eigen::VectorXd& z,
                          double t) {
  if (z.size() != static_cast<Eigen::Index>(sys.dim()))
    throw GridMismatchError("flat vector does not match the system dimension");
  if (t == 0.0) return z;
  const double work = sys.balanced_norm1 * std::abs(t);
  const std::int64_t steps = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(work / kStepTheta)));
  if (steps > kMaxSteps)
    throw NumericalError("propagation window too long for the mode system");
  const double h = t / static_cast<double>(steps);

  Eigen::VectorXd y = sys.balance.cwiseProduct(z);
  Eigen::VectorXd term(y.size()), acc(y.size());
  for (std::int64_t s = 0; s < steps; ++s) {
    term = y;
    acc = y;
    for (int k = 1; k <= kTaylorTerms; ++k) {
      term = (sys.generator_balanced * term) * (h / static_cast<double>(k));
      acc += term;
      if (term.lpNorm<Eigen::Infinity>() <=
          1e-16 * acc.lpNorm<Eigen::Infinity>())
        break;
    }
    y = acc;
  }
  return sys.balance.cwiseInverse().cwiseProduct(y);
}

PhasePoint propagate(const ModeSystem& sys, const PhasePoint& p, double t) {
  return unpack(sys, propagate(sys, pack(sys, p), t));
}

ChiComparison oracle_chi(const ModeSystem& sys, const WeylLabel& l, double t,
                         const EnvironmentState& env) {
  const std::size_t n = sys.modes();
  const Eigen::Index m = static_cast<Eigen::Index>(n) + 1;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(2 * m);
  z[0] = l.a;
  z[m] = l.b;
  const PhasePoint pt = unpack(sys, propagate(sys, z, t));
  ChiComparison out;
  out.oracle = std::exp(-decoherence_exponent(pt.u, pt.v, env));

  if (sys.kind.kind == ModelSelector::Kind::velocity) {
    std::optional<double> beta;
    if (env.is_thermal()) beta = env.beta;
    const WeightedIntegral phi = oscillatory_integral(
        sys.profile, -3.0, t, OscKernel::one_minus_cos, beta);
    if (!phi.converged)
      throw NumericalError("attenuation integral did not converge");
    out.analytic = std::exp(-0.5 * l.b * l.b * phi.value);
  } else {
    FriedrichsOperator::Options fo;
    fo.grid_modes = static_cast<int>(sys.modes());
    fo.scheme = sys.scheme;
    const FriedrichsOperator op(sys.kind.omega0, sys.profile, fo);
    out.analytic = std::exp(-op.exponent(l, t, env));
  }
  out.abs_diff = std::abs(out.analytic - out.oracle);
  return out;
}

DriftFit fit_drift(const ModeSystem& sys, double b, double t_lo, double t_hi,
                   int samples, Exec exec) {
  if (sys.kind.kind != ModelSelector::Kind::velocity)
    throw ConfigError("drift fit is defined for the velocity coupling");
  if (b == 0.0)
    throw ConfigError("drift fit needs a nonzero momentum label");
  if (samples < 8)
    throw WindowTooShortError("drift fit needs at least 8 samples");
  if (!(t_lo >= 0.0) || !(t_hi > t_lo) ||
      t_hi - t_lo < 1e-9 * std::max(1.0, t_hi))
    throw WindowTooShortError("drift fit window has no usable extent");

  const std::size_t n = static_cast<std::size_t>(samples);
  std::vector<double> ts(n), resid(n);
  for (std::size_t i = 0; i < n; ++i) {
    ts[i] = t_lo + (t_hi - t_lo) * static_cast<double>(i) /
                       static_cast<double>(n - 1);
  }
  const Eigen::Index m = static_cast<Eigen::Index>(sys.modes()) + 1;
  parallel_for(static_cast<std::int64_t>(n), exec, [&](std::int64_t k) {
    const std::size_t i = static_cast<std::size_t>(k);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(2 * m);
    z[m] = b;
    const Eigen::VectorXd zt = propagate(sys, z, ts[i]);
    const WeightedIntegral osc =
        oscillatory_integral(sys.profile, -3.0, ts[i], OscKernel::sin_wt);
    if (!osc.converged)
      throw NumericalError("drift integral did not converge");
    resid[i] = zt[0] / b - osc.value;
  });

  double mt = 0.0, mr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += ts[i];
    mr += resid[i];
  }
  mt /= static_cast<double>(n);
  mr /= static_cast<double>(n);
  double stt = 0.0, str = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    str += (ts[i] - mt) * (resid[i] - mr);
  }
  if (!(stt > 0.0))
    throw WindowTooShortError("drift fit window has no spread in time");
  DriftFit fit;
  fit.samples = samples;
  fit.alpha_sq = str / stt;
  const double intercept = mr - fit.alpha_sq * mt;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = resid[i] - intercept - fit.alpha_sq * ts[i];
    sse += e * e;
  }
  const int df = samples - 2;
  fit.stderr_slope = std::sqrt(sse / static_cast<double>(df) / stt);
  fit.ci_half_width = student95(df) * fit.stderr_slope;
  return fit;
}

}  // namespace decoh
