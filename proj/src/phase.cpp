// Compiled with -ffast-math so that the sin and cos loops map onto the vector
// math library. They are kept as separate loops because a combined loop is
// folded into scalar sincos calls. Nothing else belongs in this file.

#include <cmath>
#include <cstddef>

#include "phase.hpp"

namespace movgrid::detail {

constexpr std::size_t kChunk = 256;

// One clone per instruction set, picked at load time.
__attribute__((target_clones("avx2", "default"))) void multiply_by_phase(cplx* a_c, const double* v, double factor,
                                                                         std::size_t n) {
  double* a = reinterpret_cast<double*>(a_c);
  double c[kChunk], s[kChunk];
  for (std::size_t start = 0; start < n; start += kChunk) {
    const std::size_t m = n - start < kChunk ? n - start : kChunk;
    const double* x = v + start;
    for (std::size_t i = 0; i < m; ++i) c[i] = std::cos(factor * x[i]);
    for (std::size_t i = 0; i < m; ++i) s[i] = std::sin(factor * x[i]);
    double* b = a + 2 * start;
    for (std::size_t i = 0; i < m; ++i) {
      const double re = b[2 * i], im = b[2 * i + 1];
      b[2 * i] = re * c[i] - im * s[i];
      b[2 * i + 1] = re * s[i] + im * c[i];
    }
  }
}

}  // namespace movgrid::detail
