#pragma once

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace posctrl {

// Threads the OpenMP runtime would give a parallel region (1 without OpenMP).
inline int batch_thread_count() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Runs fn(0..count-1), in parallel when requested and OpenMP is available.
// The serial path is the reference; callers must make fn(i) independent of
// execution order (per-index state, no cross-index writes) so both paths
// produce identical results. fn must not throw.
template <class Fn>
void for_each_index(int count, Fn&& fn, bool parallel = true) {
#if defined(_OPENMP)
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
#else
  (void)parallel;
#endif
  for (int i = 0; i < count; ++i) fn(i);
}

}  // namespace posctrl
