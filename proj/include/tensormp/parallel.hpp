#pragma once

#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tensormp {

inline int hardware_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Default worker count: TENSORMP_THREADS when set, hardware otherwise.
inline int default_threads() {
  if (const char* env = std::getenv("TENSORMP_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return hardware_threads();
}

// Runs fn(i) for i in [0, count).  threads == 1 takes the plain serial loop,
// which is the reference path the tests compare against.  Each index must
// write only its own output slot; under that contract the results are
// identical for every thread count, only wall time changes.  Exceptions from
// worker indices are captured and the first one rethrown after the join
// (throwing across an OpenMP region would terminate).
template <class F>
void for_each_index(std::size_t count, int threads, F&& fn) {
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
#ifdef _OPENMP
  std::exception_ptr failure = nullptr;
  std::mutex failure_mutex;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long long i = 0; i < static_cast<long long>(count); ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
#else
  for (std::size_t i = 0; i < count; ++i) fn(i);
#endif
}

}  // namespace tensormp
