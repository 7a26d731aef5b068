#include "decoh/superselection.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "json.hpp"

#include "decoh/errors.hpp"
#include "decoh/io.hpp"

namespace decoh {

MomentumInterval make_interval(double lo, double hi) {
  if (!(lo <= hi))
    throw ConfigError("momentum interval needs lo <= hi");
  return {lo, hi};
}

double interval_distance(const MomentumInterval& i1,
                         const MomentumInterval& i2) {
  if (!(i1.lo <= i1.hi) || !(i2.lo <= i2.hi))
    throw ConfigError("momentum interval needs lo <= hi");
  const double gap = std::max(i1.lo - i2.hi, i2.lo - i1.hi);
  if (!(gap > 0.0))
    throw IntervalsOverlapError(
        "momentum intervals must be separated by a positive distance");
  return gap;
}

bool offdiag_is_zero(double b, const MomentumInterval& i1,
                     const MomentumInterval& i2) {
  if (!(i1.lo <= i1.hi) || !(i2.lo <= i2.hi))
    throw ConfigError("momentum interval needs lo <= hi");
  return b < i2.lo - i1.hi || b > i2.hi - i1.lo;
}

OffdiagBound offdiag_bound(const WeylCombination& comb,
                           const MomentumInterval& i1,
                           const MomentumInterval& i2, double phi_tilde) {
  if (!(phi_tilde >= 0.0))
    throw ConfigError("attenuation envelope must be non-negative");
  const double delta = interval_distance(i1, i2);
  OffdiagBound out;
  double total = 0.0;
  for (const WeylTerm& term : comb.terms) {
    if (!(term.coeff_abs >= 0.0))
      throw ConfigError("term coefficient magnitude must be non-negative");
    total += term.coeff_abs;
    if (offdiag_is_zero(term.b, i1, i2)) continue;
    out.per_term += term.coeff_abs * std::exp(-term.b * term.b * phi_tilde);
  }
  out.separation = total * std::exp(-delta * delta * phi_tilde);
  return out;
}

std::string SuperselectionSweep::to_csv() const {
  std::string out = "t,per_term_bound,separation_bound,phi_envelope\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    out += format_double(t[i]);
    out += ',';
    out += format_double(per_term[i]);
    out += ',';
    out += format_double(separation[i]);
    out += ',';
    out += format_double(phi_envelope[i]);
    out += '\n';
  }
  return out;
}

std::string SuperselectionSweep::to_json() const {
  nlohmann::json j;
  j["t"] = t;
  j["per_term_bound"] = per_term;
  j["separation_bound"] = separation;
  j["phi_envelope"] = phi_envelope;
  j["delta"] = delta;
  j["coeff_sum"] = coeff_sum;
  j["tail_slope"] = tail_slope;
  j["saturating"] = saturating;
  if (!metadata_json.empty())
    j["metadata"] = nlohmann::json::parse(metadata_json);
  return j.dump(2);
}

void SuperselectionSweep::write_csv(const std::string& path) const {
  atomic_write(path, to_csv());
}

void SuperselectionSweep::write_json(const std::string& path) const {
  atomic_write(path, to_json());
}

SuperselectionSweep superselection_sweep(const VelocityModel& model,
                                         const WeylCombination& comb,
                                         const MomentumInterval& i1,
                                         const MomentumInterval& i2,
                                         const std::vector<double>& times,
                                         Exec exec) {
  SuperselectionSweep out;
  out.delta = interval_distance(i1, i2);
  for (const WeylTerm& term : comb.terms) {
    if (!(term.coeff_abs >= 0.0))
      throw ConfigError("term coefficient magnitude must be non-negative");
    out.coeff_sum += term.coeff_abs;
  }
  out.t = times;
  out.phi_envelope = model.phi_envelope(times, exec);
  const std::size_t n = times.size();
  out.per_term.resize(n);
  out.separation.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const OffdiagBound b = offdiag_bound(comb, i1, i2, out.phi_envelope[i]);
    out.per_term[i] = b.per_term;
    out.separation[i] = b.separation;
  }

  // Trailing-decade log-log slope of the separation bound, and whether the
  // envelope has already leveled off there.
  double t_max = 0.0;
  for (double v : times) t_max = std::max(t_max, v);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t m = 0;
  double phi_lo = 0.0, phi_hi = 0.0;
  bool have_lo = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(times[i] >= 0.1 * t_max) || !(times[i] > 0.0)) continue;
    if (!(out.separation[i] > 0.0)) continue;
    const double x = std::log(times[i]);
    const double y = std::log(out.separation[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
    if (!have_lo) {
      phi_lo = out.phi_envelope[i];
      have_lo = true;
    }
    phi_hi = out.phi_envelope[i];
  }
  if (m >= 5) {
    const double den = static_cast<double>(m) * sxx - sx * sx;
    if (den > 0.0)
      out.tail_slope = (static_cast<double>(m) * sxy - sx * sy) / den;
  }
  out.saturating =
      have_lo && (phi_hi - phi_lo) <= 1e-2 * std::max(1.0, phi_hi);

  nlohmann::json meta;
  meta["model"] = "velocity";
  meta["interval_1"] = {{"lo", i1.lo}, {"hi", i1.hi}};
  meta["interval_2"] = {{"lo", i2.lo}, {"hi", i2.hi}};
  meta["transfer_window"] = {i2.lo - i1.hi, i2.hi - i1.lo};
  meta["terms"] = comb.terms.size();
  meta["envelope"] = "vacuum";  // valid upper bound in any environment
  out.metadata_json = meta.dump();
  return out;
}

}  // namespace decoh
