#pragma once

#include <cstddef>

namespace nhim {

/// Runs body(i) for i in [0, n). The parallel path distributes iterations
/// over OpenMP threads; every body writes only its own output slot, so the
/// result is identical to the serial path bit for bit.
template <typename Body>
void parallel_for(std::ptrdiff_t n, const Body& body, bool parallel = true) {
  if (!parallel) {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
}

}  // namespace nhim
