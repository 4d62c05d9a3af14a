#pragma once

#include <cstddef>

#include "movgrid/wave_state.hpp"

namespace movgrid::detail {

/// a[i] *= exp(i factor v[i]).
void multiply_by_phase(cplx* a, const double* v, double factor, std::size_t n);

}  // namespace movgrid::detail
