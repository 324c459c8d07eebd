#pragma once

#include <cstdint>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fbmclt {

/// Thread count for the OpenMP kernels; 0 means the OpenMP default.
/// Results never depend on this value: work is split into fixed tasks, each
/// task owns its random stream, and reductions run afterwards in task order.
struct Parallelism {
  int threads = 0;
};

inline int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Runs body(i) for i in [0, n) over a dynamic OpenMP schedule. The first
/// exception thrown by any task (lowest index wins) is rethrown on the caller.
template <class Body>
void parallel_for(std::int64_t n, Parallelism par, Body&& body) {
  std::exception_ptr error;
  std::int64_t error_index = n;
  std::mutex error_mutex;
  const int threads = par.threads > 0 ? par.threads : max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (i < error_index) {
        error_index = i;
        error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Serial counterpart used by the reference paths and the benchmarks.
template <class Body>
void serial_for(std::int64_t n, Body&& body) {
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace fbmclt
