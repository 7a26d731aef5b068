// Execution policy for the data-parallel sweep kernels.  Every parallel loop
// writes to preassigned slots, so serial and OpenMP runs produce identical
// bits; the serial path is kept as the reference implementation for tests and
// benchmarks.
#pragma once

#include <cstdint>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace decoh {

enum class Exec { serial, parallel };

inline void set_thread_count(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

// Exceptions thrown by the body are captured and rethrown after the loop
// (they must not unwind across an OpenMP region).
template <class F>
void parallel_for(std::int64_t n, Exec exec, F&& body) {
#ifdef _OPENMP
  if (exec == Exec::parallel) {
    std::exception_ptr first;
    std::mutex guard;
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(guard);
        if (!first) first = std::current_exception();
      }
    }
    if (first) std::rethrow_exception(first);
    return;
  }
#else
  (void)exec;
#endif
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace decoh
