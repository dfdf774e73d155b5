#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ftf::par {

enum class Mode { serial, parallel };

// Maps fn over [0, n). The parallel path uses OpenMP with a dynamic schedule;
// results must be written by index so the merge order is deterministic.
// The serial path is the reference implementation used by tests and the
// benchmark target.
template <typename Fn>
void map_indices(std::ptrdiff_t n, Fn&& fn, Mode mode = Mode::parallel) {
  if (mode == Mode::serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
#else
  for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
#endif
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace ftf::par
