// Compares the serial reference implementation of the sweep kernels against
// the OpenMP path: same bits, hopefully less wall time.  Build target
// `bench_parallel`; not part of the test suite.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "decoh/environment.hpp"
#include "decoh/form_factor.hpp"
#include "decoh/parallel.hpp"
#include "decoh/position_model.hpp"
#include "decoh/velocity_model.hpp"

using decoh::EnvironmentState;
using decoh::Exec;
using decoh::FormFactor;

namespace {

template <class F>
double time_s(const F& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::vector<double> log_times(double lo, double hi, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i)
    t[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return t;
}

void report(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-28s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   %s\n",
              name, serial, parallel, serial / parallel,
              identical ? "bit-identical" : "OUTPUT MISMATCH");
}

}  // namespace

int main() {
  std::printf("sweep kernels, serial reference vs OpenMP\n\n");

  {
    decoh::VelocityModel::Options opts;
    opts.grid_modes = 256;
    const decoh::VelocityModel m(FormFactor::power_law(1.0, 2.0, 1.0), opts);
    const std::vector<double> times = log_times(1e-2, 1e3, 4000);
    const EnvironmentState th = EnvironmentState::thermal(1.0);
    decoh::DecoherenceCurve serial_curve, parallel_curve;
    const double ts = time_s([&] {
      serial_curve = m.sample_curve({0.0, 1.0}, times, th, Exec::serial);
    });
    const double tp = time_s([&] {
      parallel_curve = m.sample_curve({0.0, 1.0}, times, th, Exec::parallel);
    });
    report("velocity curve (4000 pts)", ts, tp,
           serial_curve.abs_chi == parallel_curve.abs_chi &&
               serial_curve.a_t == parallel_curve.a_t);
  }

  {
    decoh::FriedrichsOperator::Options opts;
    opts.grid_modes = 512;
    const decoh::FriedrichsOperator op(
        1.0, FormFactor::power_law_with_norm(2.0, 2.0, 0.25), opts);
    decoh::SpectralDensity ds, dp;
    const double ts =
        time_s([&] { ds = op.spectral_density(0.0, Exec::serial); });
    const double tp =
        time_s([&] { dp = op.spectral_density(0.0, Exec::parallel); });
    report("spectral density", ts, tp, ds.rho == dp.rho);
  }

  {
    decoh::FriedrichsOperator::Options opts;
    opts.grid_modes = 700;
    const decoh::FriedrichsOperator op(
        1.0, FormFactor::power_law_with_norm(2.0, 2.0, 0.25), opts);
    std::vector<double> times;
    for (int i = 0; i <= 600; ++i) times.push_back(0.05 * i);
    decoh::DecoherenceCurve serial_curve, parallel_curve;
    const double ts = time_s([&] {
      serial_curve = op.sample_curve({0.0, 1.0}, times,
                                     EnvironmentState::vacuum(), Exec::serial);
    });
    const double tp = time_s([&] {
      parallel_curve = op.sample_curve(
          {0.0, 1.0}, times, EnvironmentState::vacuum(), Exec::parallel);
    });
    report("position curve (600 pts)", ts, tp,
           serial_curve.abs_chi == parallel_curve.abs_chi);
  }

  std::printf(
      "\nSpeedups track the available cores; on a single-core host both "
      "columns should agree.\n");
  return 0;
}
