// Spectral coupling profile J(omega) of the boson field: either the default
// power-law family J = c^2 omega^(2 sigma) exp(-2 omega / Lambda) or a
// tabulated two-column profile with linear interpolation.
#pragma once

#include <string>
#include <vector>

namespace decoh {

class FormFactor {
 public:
  // Default-constructed: the uncoupled profile J = 0.
  FormFactor() = default;

  // Default family with exponent sigma > 1/2, exponential cutoff scale
  // Lambda > 0 and amplitude c >= 0 (c = 0 is the uncoupled limit).
  static FormFactor power_law(double sigma, double cutoff, double amplitude);

  // Same family, but the amplitude is solved so that the coupling norm
  // int J(w) w^-2 dw equals coupling_norm_sq.
  static FormFactor power_law_with_norm(double sigma, double cutoff,
                                        double coupling_norm_sq);

  // Tabulated profile on strictly increasing omega > 0; J is interpolated
  // linearly between nodes and treated as zero outside the table.
  static FormFactor tabulated(std::vector<double> omega,
                              std::vector<double> value);

  // Two-column CSV (omega, J), optional header line.
  static FormFactor from_csv(const std::string& path);

  double operator()(double omega) const;

  bool is_power_law() const { return power_law_; }
  double sigma() const;
  double cutoff() const;
  double amplitude() const;

  // Estimated exponent s of J ~ omega^s for omega -> 0, with a one-sigma
  // uncertainty (zero for the closed-form family).
  struct SmallOmegaFit {
    double exponent;
    double uncertainty;
  };
  SmallOmegaFit small_omega_exponent() const;

  // Frequency beyond which the profile carries less than 1e-12 of its mass.
  double support_max() const { return support_max_; }

  // int_0^inf J dw.
  double total_mass() const { return total_mass_; }

  // Upper bound on int_omega^inf J dw.
  double tail_mass_bound(double omega) const;

  // Closed-form int J(w) w^p dw for the power-law family (internal reference;
  // throws for tabulated profiles or non-convergent powers).
  double family_weighted_integral(double p) const;

  const std::vector<double>& table_omega() const { return tab_omega_; }
  const std::vector<double>& table_value() const { return tab_value_; }

 private:
  void finalize();

  bool power_law_ = true;
  double sigma_ = 1.0;
  double cutoff_ = 1.0;
  double amplitude_sq_ = 0.0;
  std::vector<double> tab_omega_;
  std::vector<double> tab_value_;
  double support_max_ = 1.0;
  double total_mass_ = 0.0;
};

}  // namespace decoh
