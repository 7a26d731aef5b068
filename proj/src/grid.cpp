#include "decoh/grid.hpp"

#include <cmath>

#include "decoh/errors.hpp"
#include "decoh/spectral_kernel.hpp"

namespace decoh {

GridScheme default_scheme(const FormFactor& j) {
  try {
    return ir_classify(j) == IrClass::ir_divergent ? GridScheme::geometric
                                                   : GridScheme::linear;
  } catch (const IndeterminateError&) {
    return GridScheme::geometric;
  }
}

FieldGrid make_field_grid(const FormFactor& j, int modes, GridScheme scheme) {
  if (modes < 1) throw ConfigError("grid needs at least one mode");
  double lo, hi;
  if (j.is_power_law()) {
    lo = j.cutoff() * 1e-6;
    hi = j.support_max();
  } else {
    lo = j.table_omega().front();
    hi = j.table_omega().back();
  }
  if (!(hi > lo)) throw ConfigError("degenerate frequency range for grid");

  auto omega = std::make_shared<std::vector<double>>();
  std::vector<double> weight, coupling;
  omega->reserve(modes);
  weight.reserve(modes);
  coupling.reserve(modes);
  const double n = static_cast<double>(modes);
  for (int i = 0; i < modes; ++i) {
    double a, b;
    if (scheme == GridScheme::linear) {
      a = lo + (hi - lo) * i / n;
      b = lo + (hi - lo) * (i + 1) / n;
    } else {
      const double r = std::log(hi / lo);
      a = lo * std::exp(r * i / n);
      b = lo * std::exp(r * (i + 1) / n);
    }
    const double mid = 0.5 * (a + b);
    omega->push_back(mid);
    weight.push_back(b - a);
    coupling.push_back(std::sqrt(j(mid) * (b - a)));
  }
  return FieldGrid(std::move(omega), std::move(weight), std::move(coupling));
}

}  // namespace decoh
