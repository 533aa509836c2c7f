#pragma once

#include <cstdint>
#include <exception>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dfa {

// Worker cap: min(hardware, DFA_THREADS env var, set_threads override).
int max_threads();
void set_threads(int n);  // n <= 0 restores the default

// OpenMP-parallel index loop; body exceptions are captured on the worker and
// rethrown on the calling thread. threads == 1 (or no OpenMP) runs inline.
template <class F>
void parallel_for(std::int64_t n, F&& f, int threads = 0) {
  int nt = threads > 0 ? threads : max_threads();
#ifdef _OPENMP
  if (nt > 1 && n > 1) {
    std::exception_ptr err = nullptr;
#pragma omp parallel for schedule(static) num_threads(nt)
    for (std::int64_t i = 0; i < n; ++i) {
      if (err) continue;
      try {
        f(i);
      } catch (...) {
#pragma omp critical(dfa_parallel_for_err)
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    return;
  }
#endif
  for (std::int64_t i = 0; i < n; ++i) f(i);
}

// Plain loop, kept as the reference path the parallel kernels are checked
// against.
template <class F>
void serial_for(std::int64_t n, F&& f) {
  for (std::int64_t i = 0; i < n; ++i) f(i);
}

}  // namespace dfa
