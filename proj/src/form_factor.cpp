#include "decoh/form_factor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "decoh/errors.hpp"

namespace decoh {

namespace {

bool finite(double x) { return std::isfinite(x); }

}  // namespace

FormFactor FormFactor::power_law(double sigma, double cutoff,
                                 double amplitude) {
  if (!finite(sigma) || !finite(cutoff) || !finite(amplitude))
    throw ConfigError("form factor parameters must be finite");
  if (!(cutoff > 0.0))
    throw CutoffMissingError("power-law profile requires cutoff > 0");
  if (!(sigma > 0.5))
    throw IrDivergentError(
        "sigma <= 1/2 makes the coupling norm diverge; the model is "
        "inadmissible");
  if (amplitude < 0.0) throw ConfigError("amplitude must be >= 0");
  FormFactor j;
  j.power_law_ = true;
  j.sigma_ = sigma;
  j.cutoff_ = cutoff;
  j.amplitude_sq_ = amplitude * amplitude;
  j.finalize();
  return j;
}

FormFactor FormFactor::power_law_with_norm(double sigma, double cutoff,
                                           double coupling_norm_sq) {
  if (!(coupling_norm_sq >= 0.0) || !finite(coupling_norm_sq))
    throw ConfigError("target coupling norm must be >= 0");
  FormFactor j = power_law(sigma, cutoff, 1.0);
  const double unit_norm = j.family_weighted_integral(-2.0);
  j.amplitude_sq_ = coupling_norm_sq / unit_norm;
  j.finalize();
  return j;
}

FormFactor FormFactor::tabulated(std::vector<double> omega,
                                 std::vector<double> value) {
  if (omega.size() != value.size() || omega.size() < 4)
    throw ConfigError("tabulated profile needs >= 4 (omega, J) rows");
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (!finite(omega[i]) || !finite(value[i]) || value[i] < 0.0)
      throw ConfigError("tabulated profile entries must be finite, J >= 0");
    if (omega[i] <= 0.0 || (i > 0 && omega[i] <= omega[i - 1]))
      throw ConfigError("tabulated omega must be strictly increasing and > 0");
  }
  const double peak = *std::max_element(value.begin(), value.end());
  if (!(peak > 0.0)) throw ConfigError("tabulated profile is identically zero");
  if (value.back() > 1e-3 * peak)
    throw CutoffMissingError(
        "tabulated profile does not decay at its upper end");
  FormFactor j;
  j.power_law_ = false;
  j.tab_omega_ = std::move(omega);
  j.tab_value_ = std::move(value);
  j.finalize();
  return j;
}

FormFactor FormFactor::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open profile file: " + path);
  std::vector<double> w, v;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a, b;
    if (!(row >> a >> b)) {
      if (w.empty()) continue;  // tolerate a header line
      throw ConfigError("malformed profile row: " + line);
    }
    w.push_back(a);
    v.push_back(b);
  }
  return tabulated(std::move(w), std::move(v));
}

double FormFactor::operator()(double omega) const {
  if (omega <= 0.0) return 0.0;
  if (power_law_) {
    if (amplitude_sq_ == 0.0) return 0.0;
    return amplitude_sq_ *
           std::exp(2.0 * sigma_ * std::log(omega) - 2.0 * omega / cutoff_);
  }
  if (omega < tab_omega_.front() || omega > tab_omega_.back()) return 0.0;
  const auto it =
      std::upper_bound(tab_omega_.begin(), tab_omega_.end(), omega);
  const std::size_t hi = std::min<std::size_t>(
      tab_omega_.size() - 1, static_cast<std::size_t>(it - tab_omega_.begin()));
  const std::size_t lo = hi == 0 ? 0 : hi - 1;
  if (hi == lo) return tab_value_[lo];
  const double f =
      (omega - tab_omega_[lo]) / (tab_omega_[hi] - tab_omega_[lo]);
  return tab_value_[lo] + f * (tab_value_[hi] - tab_value_[lo]);
}

double FormFactor::sigma() const {
  if (!power_law_) throw ConfigError("sigma undefined for tabulated profile");
  return sigma_;
}

double FormFactor::cutoff() const {
  if (!power_law_) throw ConfigError("cutoff undefined for tabulated profile");
  return cutoff_;
}

double FormFactor::amplitude() const {
  if (!power_law_)
    throw ConfigError("amplitude undefined for tabulated profile");
  return std::sqrt(amplitude_sq_);
}

FormFactor::SmallOmegaFit FormFactor::small_omega_exponent() const {
  if (power_law_) return {2.0 * sigma_, 0.0};
  // Least-squares slope of log J vs log omega over the leading table rows.
  std::size_t n = std::min<std::size_t>(8, tab_omega_.size() / 2);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < tab_omega_.size() && x.size() < n; ++i) {
    if (tab_value_[i] > 0.0) {
      x.push_back(std::log(tab_omega_[i]));
      y.push_back(std::log(tab_value_[i]));
    }
  }
  if (x.size() < 3)
    throw IndeterminateError(
        "too few positive leading rows to estimate the small-omega slope");
  const std::size_t m = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0))
    throw IndeterminateError("degenerate abscissae in slope estimate");
  const double slope = sxy / sxx;
  double rss = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - my - slope * (x[i] - mx);
    rss += r * r;
  }
  const double se =
      m > 2 ? std::sqrt(rss / (static_cast<double>(m - 2) * sxx)) : 0.0;
  return {slope, se};
}

double FormFactor::tail_mass_bound(double omega) const {
  if (power_law_) {
    if (amplitude_sq_ == 0.0) return 0.0;
    const double mu = 2.0 / cutoff_;
    const double q = 2.0 * sigma_;
    const double wstar = 2.0 * q / mu;
    // For w >= 2q/mu the integrand is below w^q e^(-mu w / 2) e^(-mu w / 2)
    // with the first factor decreasing, so the tail is bounded by a plain
    // exponential integral.
    const auto beyond = [&](double w) {
      return amplitude_sq_ * std::exp(q * std::log(w) - mu * w) * 2.0 / mu;
    };
    if (omega >= wstar) return beyond(omega);
    // Before that point, cover the gap with the profile's peak value.
    const double peak = amplitude_sq_ * std::exp(q * std::log(q / mu) - q);
    return std::min(total_mass_,
                    (wstar - omega) * peak + beyond(wstar));
  }
  if (omega >= tab_omega_.back()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 1; i < tab_omega_.size(); ++i) {
    const double a = std::max(omega, tab_omega_[i - 1]);
    const double b = tab_omega_[i];
    if (b <= a) continue;
    s += 0.5 * (b - a) *
         (std::max(tab_value_[i - 1], tab_value_[i]) + tab_value_[i]);
  }
  return s;
}

double FormFactor::family_weighted_integral(double p) const {
  if (!power_law_)
    throw ConfigError("closed-form integral requires the power-law family");
  const double q = 2.0 * sigma_ + p;
  if (!(q > -1.0))
    throw IrDivergentError("int J w^p diverges at omega -> 0 for this power");
  const double mu = 2.0 / cutoff_;
  return amplitude_sq_ *
         std::exp(std::lgamma(q + 1.0) - (q + 1.0) * std::log(mu));
}

void FormFactor::finalize() {
  if (power_law_) {
    if (amplitude_sq_ == 0.0) {
      total_mass_ = 0.0;
      support_max_ = cutoff_;
      return;
    }
    total_mass_ = family_weighted_integral(0.0);
    // Bisect for the 1e-12 relative tail threshold.
    double lo = 2.0 * sigma_ * cutoff_ / 2.0 + cutoff_;
    double hi = lo;
    while (tail_mass_bound(hi) > 1e-12 * total_mass_) hi *= 2.0;
    while (hi - lo > 1e-3 * cutoff_) {
      const double mid = 0.5 * (lo + hi);
      (tail_mass_bound(mid) > 1e-12 * total_mass_ ? lo : hi) = mid;
    }
    support_max_ = hi;
    return;
  }
  double s = 0.0;
  for (std::size_t i = 1; i < tab_omega_.size(); ++i)
    s += 0.5 * (tab_omega_[i] - tab_omega_[i - 1]) *
         (tab_value_[i] + tab_value_[i - 1]);
  total_mass_ = s;
  support_max_ = tab_omega_.back();
}

}  // namespace decoh
