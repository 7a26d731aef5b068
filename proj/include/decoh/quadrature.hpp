// Adaptive Gauss-Kronrod (G7,K15) quadrature used by the spectral kernels.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace decoh {

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  bool converged = false;
};

namespace gk {

// 15-point Kronrod abscissae on [-1,1] (positive half) with the embedded
// 7-point Gauss rule on the odd-indexed nodes.
inline constexpr double kNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kWeightK[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kWeightG[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

// Evaluate both rules on [a,b]; returns the K15 value, the |K15-G7| error
// estimate, and the integral of |f| (used for noise floors).
template <class F>
void panel(const F& f, double a, double b, double& value, double& error,
           double& resabs) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kNodes[i]);
    fv[14 - i] = f(c + h * kNodes[i]);
  }
  fv[7] = f(c);
  double k15 = 0.0, g7 = 0.0, babs = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double sum = (i == 7) ? fv[7] : fv[i] + fv[14 - i];
    k15 += kWeightK[i] * sum;
    babs += kWeightK[i] * ((i == 7) ? std::abs(fv[7])
                                    : std::abs(fv[i]) + std::abs(fv[14 - i]));
    if (i % 2 == 1) g7 += kWeightG[i / 2] * sum;
  }
  value = k15 * h;
  resabs = babs * h;
  const double diff = std::abs(k15 - g7) * h;
  // QUADPACK-style sharpened estimate: the raw difference overestimates badly
  // once the panel is nearly converged.
  error = (resabs > 0.0 && diff > 0.0)
              ? std::min(diff, resabs * std::pow(200.0 * diff / resabs, 1.5))
              : diff;
  if (!(error > 0.0)) error = diff;
}

}  // namespace gk

// Globally adaptive bisection on [a,b].  Stops when the summed error estimate
// satisfies the absolute or relative target, or when the panel budget runs out
// (converged=false in that case).
template <class F>
QuadResult adaptive_gk(const F& f, double a, double b, double rel_tol,
                       double abs_tol = 0.0, int max_panels = 4000) {
  struct Interval {
    double a, b, value, error;
  };
  QuadResult out;
  if (!(b > a)) {
    out.converged = true;
    return out;
  }
  double v, e, ra;
  gk::panel(f, a, b, v, e, ra);
  std::vector<Interval> heap{{a, b, v, e}};
  auto cmp = [](const Interval& x, const Interval& y) {
    return x.error < y.error;
  };
  double total_v = v, total_e = e;
  int panels = 1;
  while (panels < max_panels) {
    const double target =
        std::max(abs_tol, rel_tol * std::max(std::abs(total_v), 1e-300));
    if (total_e <= target) break;
    std::pop_heap(heap.begin(), heap.end(), cmp);
    const Interval worst = heap.back();
    heap.pop_back();
    const double m = 0.5 * (worst.a + worst.b);
    Interval left{worst.a, m, 0, 0}, right{m, worst.b, 0, 0};
    gk::panel(f, left.a, left.b, left.value, left.error, ra);
    gk::panel(f, right.a, right.b, right.value, right.error, ra);
    total_v += left.value + right.value - worst.value;
    total_e += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), cmp);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), cmp);
    ++panels;
  }
  // Recompute sums in sorted order for reproducibility and a tighter error.
  std::sort(heap.begin(), heap.end(),
            [](const Interval& x, const Interval& y) { return x.a < y.a; });
  double sv = 0.0, cv = 0.0, se = 0.0;
  for (const Interval& iv : heap) {
    // Kahan summation; panel counts can reach the thousands.
    const double y = iv.value - cv;
    const double s = sv + y;
    cv = (s - sv) - y;
    sv = s;
    se += iv.error;
  }
  out.value = sv;
  out.abs_error = se;
  out.converged =
      se <= std::max(abs_tol, rel_tol * std::max(std::abs(sv), 1e-300)) * 1.001;
  return out;
}

}  // namespace decoh
