#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fracheat {

/// Runs body(i) for i in [0, count), in parallel when OpenMP is enabled.
/// The first exception thrown by any iteration is rethrown on the caller.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  std::exception_ptr error;
  std::mutex mutex;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Sets the worker count for later parallel regions; 0 keeps the runtime default.
inline void set_thread_count(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

}  // namespace fracheat
