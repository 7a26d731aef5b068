// Dynamical selection rules between momentum sectors: exact vanishing of
// off-diagonal matrix elements outside the reachable transfer window, and
// uniform decay bounds for finite combinations of Weyl operators, driven by
// the velocity model's attenuation envelope.
#pragma once

#include <string>
#include <vector>

#include "decoh/parallel.hpp"
#include "decoh/velocity_model.hpp"

namespace decoh {

// Closed momentum interval [lo, hi].
struct MomentumInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// One Weyl term: coefficient magnitude and label.  Only |c| and the momentum
// component b enter the bounds.
struct WeylTerm {
  double coeff_abs = 0.0;
  double a = 0.0;
  double b = 0.0;
};

struct WeylCombination {
  std::vector<WeylTerm> terms;
};

// Validates lo <= hi (throws ConfigError otherwise).
MomentumInterval make_interval(double lo, double hi);

// Distance between two closed intervals; throws IntervalsOverlapError when
// they intersect or touch (separation zero).
double interval_distance(const MomentumInterval& i1,
                         const MomentumInterval& i2);

// A momentum transfer b connects the sectors iff b lies in the closed window
// [i2.lo - i1.hi, i2.hi - i1.lo]; outside it the off-diagonal block vanishes
// identically, at every time and in every environment.
bool offdiag_is_zero(double b, const MomentumInterval& i1,
                     const MomentumInterval& i2);

struct OffdiagBound {
  double per_term = 0.0;    // sum over connecting terms of |c| exp(-b^2 phi)
  double separation = 0.0;  // (sum of all |c|) exp(-delta^2 phi)
};

// Both bounds at attenuation envelope value phi_tilde >= 0; the per-term sum
// never exceeds the separation bound.
OffdiagBound offdiag_bound(const WeylCombination& comb,
                           const MomentumInterval& i1,
                           const MomentumInterval& i2, double phi_tilde);

struct SuperselectionSweep {
  std::vector<double> t;
  std::vector<double> per_term;
  std::vector<double> separation;
  std::vector<double> phi_envelope;
  double delta = 0.0;          // interval separation
  double coeff_sum = 0.0;      // sum of all |c|
  double tail_slope = 0.0;     // d ln separation / d ln t, trailing decade
  bool saturating = false;     // envelope levels off => bounds stay positive
  std::string metadata_json;

  std::size_t size() const { return t.size(); }
  // Columns: t, per_term_bound, separation_bound, phi_envelope.
  std::string to_csv() const;
  std::string to_json() const;
  void write_csv(const std::string& path) const;
  void write_json(const std::string& path) const;
};

// Evaluates both bounds along a time grid using the model's non-decreasing
// attenuation envelope, and fits the trailing-decade log-log slope of the
// separation bound.
SuperselectionSweep superselection_sweep(const VelocityModel& model,
                                         const WeylCombination& comb,
                                         const MomentumInterval& i1,
                                         const MomentumInterval& i2,
                                         const std::vector<double>& times,
                                         Exec exec = Exec::parallel);

}  // namespace decoh
