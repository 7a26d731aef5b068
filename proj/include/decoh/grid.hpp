// Frequency discretization of a spectral profile into modes: midpoint nodes,
// panel weights, and the per-mode couplings g_i = sqrt(J(w_i) dw_i).
#pragma once

#include <memory>
#include <vector>

#include "decoh/form_factor.hpp"

namespace decoh {

enum class GridScheme { linear, geometric };

class FieldGrid {
 public:
  FieldGrid() = default;
  FieldGrid(std::shared_ptr<const std::vector<double>> omega,
            std::vector<double> weight, std::vector<double> coupling)
      : omega_(std::move(omega)),
        weight_(std::move(weight)),
        coupling_(std::move(coupling)) {}

  std::size_t size() const { return omega_ ? omega_->size() : 0; }
  const std::vector<double>& omega() const { return *omega_; }
  const std::vector<double>& weight() const { return weight_; }
  const std::vector<double>& coupling() const { return coupling_; }
  const std::shared_ptr<const std::vector<double>>& shared_omega() const {
    return omega_;
  }

 private:
  std::shared_ptr<const std::vector<double>> omega_;
  std::vector<double> weight_;
  std::vector<double> coupling_;
};

// Midpoint discretization on [w_min, w_max] with w_min = Lambda * 1e-6 (first
// table node for tabulated profiles) and w_max covering all but 1e-12 of the
// profile's mass.  The geometric scheme places panel boundaries in log space
// and is the default for infrared-divergent profiles.
FieldGrid make_field_grid(const FormFactor& j, int modes, GridScheme scheme);

// Scheme actually used when the caller does not force one: geometric for
// ir-divergent profiles, linear otherwise.
GridScheme default_scheme(const FormFactor& j);

}  // namespace decoh
