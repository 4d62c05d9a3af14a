#pragma once

#include <cstddef>
#include <vector>

#include "movgrid/aligned.hpp"

namespace movgrid {

/// Time-indexed observables of a propagation, stored column-wise. Vector
/// columns hold one D-tuple per sample.
struct DiagnosticSeries {
  std::size_t dims = 0;
  std::vector<double> times;
  std::vector<double> norm;
  std::vector<double> energy;
  std::vector<std::vector<double>> q_ctr, p_ctr, expect_q, expect_p;
  /// <reference|psi_t>; empty when no reference was given.
  std::vector<cplx> overlap;

  std::size_t size() const noexcept { return times.size(); }
};

}  // namespace movgrid
