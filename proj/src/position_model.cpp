#include "decoh/position_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "json.hpp"

#include "decoh/errors.hpp"
#include "decoh/io.hpp"
#include "decoh/quadrature.hpp"

namespace decoh {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Cap on the sqrt(lambda) spacing of density panels, so that integrating
// cos(sqrt(lambda) t) against the stored nodes stays accurate out to t of
// about this horizon.
constexpr double kResolvedHorizon = 60.0;
// Absolute mass tolerance distributed over the density panels.
constexpr double kDensityTol = 1e-8;
constexpr int kMaxSplitDepth = 12;
constexpr int kPanelBudget = 20000;

// The profile pushed forward to the x = w^2 axis: rho_h(x) = J(sqrt x) /
// (2 sqrt x), so that int J(w) f(w^2) dw = int rho_h(x) f(x) dx.
double halved_density(double x, const FormFactor& j) {
  if (x <= 0.0) return 0.0;
  const double w = std::sqrt(x);
  return j(w) / (2.0 * w);
}

nlohmann::json form_factor_meta(const FormFactor& j) {
  if (j.is_power_law()) {
    return {{"family", "power_law"},
            {"sigma", j.sigma()},
            {"cutoff", j.cutoff()},
            {"amplitude", j.amplitude()}};
  }
  return {{"family", "tabulated"}, {"rows", j.table_omega().size()}};
}

// One density panel: 15 Kronrod nodes stored in rule order (assembly sorts).
struct DensityPanel {
  double a = 0.0, b = 0.0;
  int depth = 0;
  std::array<double, 15> x{};
  std::array<double, 15> y{};
  std::array<double, 15> yerr{};
  double value = 0.0;
  double error = 0.0;
  double err_extrap = 0.0;
};

void fill_panel_nodes(DensityPanel& p) {
  const double c = 0.5 * (p.a + p.b);
  const double h = 0.5 * (p.b - p.a);
  for (int i = 0; i < 7; ++i) {
    p.x[i] = c - h * gk::kNodes[i];
    p.x[14 - i] = c + h * gk::kNodes[i];
  }
  p.x[7] = c;
}

void reduce_panel(DensityPanel& p) {
  const double h = 0.5 * (p.b - p.a);
  double k15 = 0.0, g7 = 0.0, babs = 0.0, eext = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double sum = (i == 7) ? p.y[7] : p.y[i] + p.y[14 - i];
    const double esum =
        (i == 7) ? p.yerr[7] : p.yerr[i] + p.yerr[14 - i];
    k15 += gk::kWeightK[i] * sum;
    babs += gk::kWeightK[i] * std::abs(sum);
    eext += gk::kWeightK[i] * esum;
    if (i % 2 == 1) g7 += gk::kWeightG[i / 2] * sum;
  }
  p.value = k15 * h;
  p.err_extrap = eext * h;
  const double diff = std::abs(k15 - g7) * h;
  const double resabs = babs * h;
  p.error = (resabs > 0.0 && diff > 0.0)
                ? std::min(diff, resabs * std::pow(200.0 * diff / resabs, 1.5))
                : diff;
}

}  // namespace

double SpectralDensity::mass() const {
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const double term = weight[i] * rho[i];
    const double y = term - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  if (point_mass) s += point_mass->weight;
  return s;
}

double SpectralDensity::moment(int k) const {
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const double term = weight[i] * rho[i] * std::pow(lambda[i], k);
    const double y = term - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  if (point_mass) s += point_mass->weight * std::pow(point_mass->lambda, k);
  return s;
}

std::string SpectralDensity::to_csv() const {
  std::string out = "lambda,rho00\n";
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    out += format_double(lambda[i]);
    out += ',';
    out += format_double(rho[i]);
    out += '\n';
  }
  return out;
}

std::string SpectralDensity::to_json() const {
  nlohmann::json j;
  j["lambda"] = lambda;
  j["rho00"] = rho;
  j["weight"] = weight;
  if (point_mass) {
    j["point_mass"] = {{"lambda", point_mass->lambda},
                       {"weight", point_mass->weight}};
  } else {
    j["point_mass"] = nullptr;
  }
  j["extrapolation_error"] = extrapolation_error;
  if (edge_exponent)
    j["edge_exponent"] = *edge_exponent;
  else
    j["edge_exponent"] = nullptr;
  j["mass"] = mass();
  if (!metadata_json.empty())
    j["metadata"] = nlohmann::json::parse(metadata_json);
  return j.dump(2);
}

void SpectralDensity::write_csv(const std::string& path) const {
  atomic_write(path, to_csv());
}

void SpectralDensity::write_json(const std::string& path) const {
  atomic_write(path, to_json());
}

FriedrichsOperator::FriedrichsOperator(double omega0, FormFactor j,
                                       Options opts)
    : omega0_(omega0), j_(std::move(j)) {
  if (!(omega0_ >= 0.0))
    throw ConfigError("particle frequency must be non-negative");
  if (opts.grid_modes < 1)
    throw ConfigError("grid_modes must be at least 1");
  boundedness_ = boundedness_check(j_, ModelSelector::position(omega0_));
  if (boundedness_ == Boundedness::supercritical) {
    throw UnboundedError(
        "position coupling exceeds omega0^2; the coupled quadratic form is "
        "unbounded below");
  }
  coupling_norm_sq_ = weighted_norm_sq(j_, -2.0).value;
  const GridScheme scheme = opts.scheme ? *opts.scheme : default_scheme(j_);
  grid_ = make_field_grid(j_, opts.grid_modes, scheme);
}

void FriedrichsOperator::ensure_eigen() const {
  if (eigen_done_) return;
  const std::size_t n = grid_.size();
  const Eigen::Index m = static_cast<Eigen::Index>(n) + 1;
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(m, m);
  mat(0, 0) = omega0_ * omega0_;
  const std::vector<double>& w = grid_.omega();
  const std::vector<double>& g = grid_.coupling();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Index k = static_cast<Eigen::Index>(i) + 1;
    mat(0, k) = g[i];
    mat(k, 0) = g[i];
    mat(k, k) = w[i] * w[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat);
  if (es.info() != Eigen::Success)
    throw EigenFailureError("square-frequency eigensolve did not converge");
  eval_ = es.eigenvalues();
  evec_ = es.eigenvectors();
  const double top = std::max(eval_.maxCoeff(), 1.0);
  const double tol = 1e-10 * top;
  for (Eigen::Index k = 0; k < eval_.size(); ++k) {
    if (eval_[k] < -tol) {
      throw UnboundedError(
          "discretized square-frequency operator has a negative eigenvalue");
    }
    if (eval_[k] < 0.0) eval_[k] = 0.0;
  }
  eigen_done_ = true;
}

std::complex<double> FriedrichsOperator::self_energy_near_cut(
    double lambda, double eps) const {
  const bool flip = eps < 0.0;
  const double e = std::abs(eps);
  const double smax = j_.support_max();
  const double x_top = 4.0 * smax * smax;
  const double rl = halved_density(lambda, j_);
  const auto re_part = [&](double x) {
    const double dx = x - lambda;
    return (halved_density(x, j_) - rl) * dx / (dx * dx + e * e);
  };
  const auto im_part = [&](double x) {
    const double dx = x - lambda;
    return (halved_density(x, j_) - rl) * e / (dx * dx + e * e);
  };
  const double floor = 1e-13 * std::max(1.0, j_.total_mass());
  double re_val = 0.0, im_val = 0.0;
  for (const auto& [lo, hi] :
       {std::pair<double, double>{0.0, std::min(lambda, x_top)},
        std::pair<double, double>{std::min(lambda, x_top), x_top}}) {
    if (!(hi > lo)) continue;
    re_val += adaptive_gk(re_part, lo, hi, 1e-9, floor, 1500).value;
    im_val += adaptive_gk(im_part, lo, hi, 1e-9, floor, 1500).value;
  }
  // Subtracted singular factor integrates in closed form.
  const std::complex<double> z(lambda, e);
  const std::complex<double> log_term =
      (rl != 0.0) ? rl * std::log((x_top - z) / (-z))
                  : std::complex<double>(0.0, 0.0);
  std::complex<double> out(re_val + log_term.real(), im_val + log_term.imag());
  return flip ? std::conj(out) : out;
}

std::complex<double> FriedrichsOperator::self_energy(
    std::complex<double> z) const {
  if (z.imag() == 0.0 && z.real() >= 0.0)
    throw OnCutError("self-energy evaluated on the spectral cut [0, inf)");
  const double smax = j_.support_max();
  const double x_top = 4.0 * smax * smax;
  const bool near_cut = z.real() > 0.0 && z.real() < x_top &&
                        std::abs(z.imag()) < 0.1 * (1.0 + z.real());
  std::complex<double> out;
  if (near_cut) {
    out = self_energy_near_cut(z.real(), z.imag());
  } else {
    const auto re_part = [&](double w) {
      const std::complex<double> d = w * w - z;
      return j_(w) * d.real() / std::norm(d);
    };
    const auto im_part = [&](double w) {
      const std::complex<double> d = w * w - z;
      return j_(w) * z.imag() / std::norm(d);
    };
    const double floor = 1e-13 * std::max(1.0, j_.total_mass());
    out = {adaptive_gk(re_part, 0.0, smax, 1e-10, floor, 2000).value,
           z.imag() == 0.0
               ? 0.0
               : adaptive_gk(im_part, 0.0, smax, 1e-10, floor, 2000).value};
  }
  if (z.imag() != 0.0 &&
      out.imag() * z.imag() < -1e-8 * (1.0 + std::abs(out))) {
    throw NumericalError("self-energy boundary value has the wrong sign");
  }
  return out;
}

FriedrichsOperator::RhoEval FriedrichsOperator::boundary_eval(
    double lambda, double eps_base) const {
  if (lambda <= 0.0) return {0.0, 0.0};
  const double w0sq = omega0_ * omega0_;
  const std::array<double, 3> eps{100.0 * eps_base, 10.0 * eps_base, eps_base};
  std::array<double, 3> val{};
  for (int i = 0; i < 3; ++i) {
    const std::complex<double> sig = self_energy_near_cut(lambda, eps[i]);
    const std::complex<double> den(w0sq - lambda - sig.real(),
                                   -(eps[i] + sig.imag()));
    val[i] = (1.0 / den).imag() / kPi;
  }
  // Polynomial extrapolation of the three boundary offsets to zero.
  const double p01 =
      (eps[0] * val[1] - eps[1] * val[0]) / (eps[0] - eps[1]);
  const double p12 =
      (eps[1] * val[2] - eps[2] * val[1]) / (eps[1] - eps[2]);
  const double p012 = (eps[0] * p12 - eps[2] * p01) / (eps[0] - eps[2]);
  double rho = p012;
  double err = std::abs(p012 - p12);
  if (rho < 0.0) {
    err += -rho;
    rho = 0.0;
  }
  return {rho, err};
}

SpectralDensity FriedrichsOperator::spectral_density(double epsilon,
                                                     Exec exec) const {
  const double w0sq = omega0_ * omega0_;
  SpectralDensity out;
  nlohmann::json meta;
  meta["omega0"] = omega0_;
  meta["form_factor"] = form_factor_meta(j_);

  if (j_.total_mass() <= 0.0) {
    // Uncoupled limit: all of the weight sits at the particle frequency.
    out.point_mass = PointMass{w0sq, 1.0};
    meta["domain"] = {0.0, 0.0};
    meta["panels"] = 0;
    meta["quadrature_error"] = 0.0;
    out.metadata_json = meta.dump();
    return out;
  }

  const double eps_base = epsilon > 0.0 ? epsilon : 1e-6 * w0sq;
  if (!(eps_base > 0.0))
    throw ConfigError("boundary offset must be positive");
  const double smax = j_.support_max();
  double l_top = smax * smax;
  if (!j_.is_power_law()) {
    const double hi = j_.table_omega().back();
    l_top = hi * hi;
  }
  l_top = std::max(l_top, std::min(2.0 * w0sq, 4.0 * smax * smax));

  // Initial panels: uniform in sqrt(lambda) so the oscillatory use of the
  // nodes stays resolved, then error-driven bisection on top.
  const double ds = kPi / kResolvedHorizon;
  std::vector<double> bounds{0.0};
  for (double s = ds; s * s < l_top; s += ds) bounds.push_back(s * s);
  bounds.push_back(l_top);

  std::vector<DensityPanel> accepted;
  std::vector<DensityPanel> pending;
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    DensityPanel p;
    p.a = bounds[i];
    p.b = bounds[i + 1];
    pending.push_back(p);
  }

  int total_panels = static_cast<int>(pending.size());
  while (!pending.empty()) {
    for (DensityPanel& p : pending) fill_panel_nodes(p);
    const std::int64_t tasks = static_cast<std::int64_t>(pending.size()) * 15;
    parallel_for(tasks, exec, [&](std::int64_t idx) {
      DensityPanel& p = pending[static_cast<std::size_t>(idx / 15)];
      const int node = static_cast<int>(idx % 15);
      const RhoEval r = boundary_eval(p.x[node], eps_base);
      p.y[node] = r.rho;
      p.yerr[node] = r.err;
    });
    std::vector<DensityPanel> next;
    for (DensityPanel& p : pending) {
      reduce_panel(p);
      const double share = kDensityTol * (p.b - p.a) / l_top;
      const bool give_up = p.depth >= kMaxSplitDepth ||
                           (p.b - p.a) <= 1e-10 * l_top ||
                           total_panels + 2 > kPanelBudget;
      if (p.error <= share || give_up) {
        accepted.push_back(p);
        continue;
      }
      const double mid = 0.5 * (p.a + p.b);
      DensityPanel left, right;
      left.a = p.a;
      left.b = mid;
      left.depth = p.depth + 1;
      right.a = mid;
      right.b = p.b;
      right.depth = p.depth + 1;
      next.push_back(left);
      next.push_back(right);
      total_panels += 1;
    }
    pending = std::move(next);
  }

  std::sort(accepted.begin(), accepted.end(),
            [](const DensityPanel& l, const DensityPanel& r) {
              return l.a < r.a;
            });
  double quad_err = 0.0, extrap_err = 0.0;
  for (const DensityPanel& p : accepted) {
    const double h = 0.5 * (p.b - p.a);
    // Emit nodes in ascending order within the panel.
    std::array<int, 15> order{};
    for (int i = 0; i < 15; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int l, int r) { return p.x[l] < p.x[r]; });
    for (int i : order) {
      const int half = i <= 7 ? i : 14 - i;
      out.lambda.push_back(p.x[i]);
      out.rho.push_back(p.y[i]);
      out.weight.push_back(h * gk::kWeightK[half]);
    }
    quad_err += p.error;
    extrap_err += p.err_extrap;
  }
  out.extrapolation_error = extrap_err;

  // Discrete eigenvalues live in spectral gaps; the default family has none,
  // but a tabulated band can leave room below or above.
  if (!j_.is_power_law()) {
    const double band_lo = j_.table_omega().front();
    const double band_hi = j_.table_omega().back();
    const auto sigma_off = [&](double lam) {
      const auto f = [&](double w) { return j_(w) / (w * w - lam); };
      return adaptive_gk(f, band_lo, band_hi, 1e-11, 0.0, 2000).value;
    };
    const auto sigma_prime = [&](double lam) {
      const auto f = [&](double w) {
        const double d = w * w - lam;
        return j_(w) / (d * d);
      };
      return adaptive_gk(f, band_lo, band_hi, 1e-11, 0.0, 2000).value;
    };
    const auto dispersion = [&](double lam) {
      return w0sq - lam - sigma_off(lam);
    };
    const auto bisect = [&](double lo, double hi) {
      for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (dispersion(mid) > 0.0)
          lo = mid;
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    };
    std::optional<PointMass> found;
    if (band_lo > 0.0) {
      const double hi = band_lo * band_lo * (1.0 - 1e-9);
      if (hi > 0.0 && dispersion(0.0) > 0.0 && dispersion(hi) < 0.0) {
        const double lam = bisect(0.0, hi);
        found = PointMass{lam, 1.0 / (1.0 + sigma_prime(lam))};
      }
    }
    if (!found) {
      const double lo = band_hi * band_hi * (1.0 + 1e-9);
      const double hi = std::max(4.0 * band_hi * band_hi, 2.0 * w0sq);
      if (dispersion(lo) > 0.0 && dispersion(hi) < 0.0) {
        const double lam = bisect(lo, hi);
        found = PointMass{lam, 1.0 / (1.0 + sigma_prime(lam))};
      }
    }
    out.point_mass = found;
  }

  // Fitted low-edge power of the density (diagnostic, e.g. for critical
  // couplings where the edge steepens).
  {
    double first_pos = 0.0;
    for (std::size_t i = 0; i < out.lambda.size(); ++i) {
      if (out.lambda[i] > 0.0 && out.rho[i] > 0.0) {
        first_pos = out.lambda[i];
        break;
      }
    }
    std::vector<double> lx, ly;
    if (first_pos > 0.0) {
      // Widen the window until it holds enough nodes for a stable fit, but
      // never past the lowest percent of the band: beyond that the power law
      // picks up curvature from the bulk of the profile.
      const double edge_cap = 0.01 * out.lambda.back();
      double hi = 100.0 * first_pos;
      for (;;) {
        lx.clear();
        ly.clear();
        for (std::size_t i = 0; i < out.lambda.size(); ++i) {
          if (out.lambda[i] >= first_pos && out.lambda[i] <= hi &&
              out.rho[i] > 0.0) {
            lx.push_back(std::log(out.lambda[i]));
            ly.push_back(std::log(out.rho[i]));
          }
        }
        if (lx.size() >= 8 || hi > edge_cap) break;
        hi *= 10.0;
      }
    }
    if (lx.size() >= 8) {
      double mx = 0.0, my = 0.0;
      for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
      }
      mx /= static_cast<double>(lx.size());
      my /= static_cast<double>(lx.size());
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
      }
      if (sxx > 0.0) out.edge_exponent = sxy / sxx;
    }
  }

  meta["epsilon_base"] = eps_base;
  meta["epsilon_levels"] = {100.0 * eps_base, 10.0 * eps_base, eps_base};
  meta["domain"] = {0.0, l_top};
  meta["panels"] = accepted.size();
  meta["quadrature_error"] = quad_err;
  out.metadata_json = meta.dump();
  return out;
}

PhasePoint FriedrichsOperator::flow(const WeylLabel& l, double t) const {
  ensure_eigen();
  const Eigen::Index m = eval_.size();
  PhasePoint p;
  if (t == 0.0) {
    p.a = l.a;
    p.b = l.b;
    p.u = FieldVector::zeros(grid_.shared_omega(), WeightRole::minus_one);
    p.v = FieldVector::zeros(grid_.shared_omega(), WeightRole::plus_one);
    return p;
  }
  Eigen::VectorXd fc(m), fs(m), fm(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double s = std::sqrt(eval_[k]);
    if (s > 0.0) {
      const double st = s * t;
      fc[k] = std::cos(st);
      fs[k] = std::sin(st) / s;
      fm[k] = s * std::sin(st);
    } else {
      // Exact zero-frequency limits of cos(st), sin(st)/s, s sin(st).
      fc[k] = 1.0;
      fs[k] = t;
      fm[k] = 0.0;
    }
  }
  const Eigen::VectorXd c = evec_.row(0).transpose();
  const Eigen::VectorXd x =
      evec_ * (l.a * fc.cwiseProduct(c) + l.b * fs.cwiseProduct(c));
  const Eigen::VectorXd y =
      evec_ * (l.b * fc.cwiseProduct(c) - l.a * fm.cwiseProduct(c));
  p.a = x[0];
  p.b = y[0];
  std::vector<double> uv(x.data() + 1, x.data() + m);
  std::vector<double> vv(y.data() + 1, y.data() + m);
  p.u = FieldVector(grid_.shared_omega(), std::move(uv), WeightRole::minus_one);
  p.v = FieldVector(grid_.shared_omega(), std::move(vv), WeightRole::plus_one);
  return p;
}

double FriedrichsOperator::exponent(const WeylLabel& l, double t,
                                    const EnvironmentState& env) const {
  const PhasePoint p = flow(l, t);
  return decoherence_exponent(p.u, p.v, env);
}

double FriedrichsOperator::cos00(double t) const {
  ensure_eigen();
  double s = 0.0;
  for (Eigen::Index k = 0; k < eval_.size(); ++k) {
    const double c = evec_(0, k);
    s += c * c * std::cos(std::sqrt(eval_[k]) * t);
  }
  return s;
}

double FriedrichsOperator::sin00(double t) const {
  ensure_eigen();
  double s = 0.0;
  for (Eigen::Index k = 0; k < eval_.size(); ++k) {
    const double c = evec_(0, k);
    const double sq = std::sqrt(eval_[k]);
    s += c * c * (sq > 0.0 ? std::sin(sq * t) / sq : t);
  }
  return s;
}

double FriedrichsOperator::cos00_from_density(const SpectralDensity& d,
                                              double t) {
  double s = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < d.lambda.size(); ++i) {
    const double term =
        d.weight[i] * d.rho[i] * std::cos(std::sqrt(d.lambda[i]) * t);
    const double y = term - comp;
    const double acc = s + y;
    comp = (acc - s) - y;
    s = acc;
  }
  if (d.point_mass)
    s += d.point_mass->weight * std::cos(std::sqrt(d.point_mass->lambda) * t);
  return s;
}

double FriedrichsOperator::sin00_from_density(const SpectralDensity& d,
                                              double t) {
  double s = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < d.lambda.size(); ++i) {
    const double sq = std::sqrt(d.lambda[i]);
    const double term =
        d.weight[i] * d.rho[i] * (sq > 0.0 ? std::sin(sq * t) / sq : t);
    const double y = term - comp;
    const double acc = s + y;
    comp = (acc - s) - y;
    s = acc;
  }
  if (d.point_mass) {
    const double sq = std::sqrt(d.point_mass->lambda);
    s += d.point_mass->weight * (sq > 0.0 ? std::sin(sq * t) / sq : t);
  }
  return s;
}

DecoherenceCurve FriedrichsOperator::sample_curve(
    const WeylLabel& l, const std::vector<double>& times,
    const EnvironmentState& env, Exec exec) const {
  ensure_eigen();
  const std::size_t n = times.size();
  DecoherenceCurve c;
  c.t = times;
  c.a_t.resize(n);
  c.b_t.resize(n);
  c.abs_chi.resize(n);
  c.exponent.resize(n);
  c.envelope_phi.resize(n);
  parallel_for(static_cast<std::int64_t>(n), exec, [&](std::int64_t i) {
    const PhasePoint p = flow(l, times[static_cast<std::size_t>(i)]);
    const double ex = decoherence_exponent(p.u, p.v, env);
    c.a_t[static_cast<std::size_t>(i)] = p.a;
    c.b_t[static_cast<std::size_t>(i)] = p.b;
    c.exponent[static_cast<std::size_t>(i)] = ex;
    c.abs_chi[static_cast<std::size_t>(i)] = std::exp(-ex);
    c.envelope_phi[static_cast<std::size_t>(i)] = ex;
  });
  for (std::size_t i = n; i-- > 1;)
    c.envelope_phi[i - 1] = std::min(c.envelope_phi[i - 1], c.envelope_phi[i]);

  nlohmann::json meta;
  meta["model"] = "position";
  meta["omega0"] = omega0_;
  meta["form_factor"] = form_factor_meta(j_);
  meta["coupling_norm_sq"] = coupling_norm_sq_;
  meta["boundedness"] = to_string(boundedness_);
  // Attenuation depends on the full label here, not only on a momentum
  // difference; the envelope column is the forward minimum of this label's
  // exponent rather than a uniform bound.
  meta["uniform_bound"] = false;
  meta["envelope"] = "forward_min_exponent";
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
