#pragma once

#include <span>

#include "movgrid/wave_state.hpp"

namespace movgrid {

/// Position -> momentum on the p-grid centered at `target_p_ctr`.
///
/// Implements psi~^K = N^{-1/2} sum_J exp(-2 pi i <K,J>) exp(-i t_KJ / hbar) psi^J
/// with t_KJ split into a J-only phase, a K-only phase and a constant, so the
/// cost is one standard DFT plus three diagonal multiplies. Throws
/// InvalidArgument if the state is not in the position representation.
WaveState to_momentum(WaveState state, std::span<const double> target_p_ctr);

/// Momentum -> position on the q-grid centered at `target_q_ctr`; the exact
/// inverse (and adjoint) of to_momentum for equal centers.
WaveState to_position(WaveState state, std::span<const double> target_q_ctr);

/// Convenience overloads keeping the state's current centers.
WaveState to_momentum(WaveState state);
WaveState to_position(WaveState state);

namespace detail {

/// Multiplies amplitude I by scale * prod_l factors[l][i_l].
void multiply_separable(std::span<cplx> amplitudes, const MultiIndexSet& index_set,
                        const std::vector<std::vector<cplx>>& factors, cplx scale);

/// The three factors of exp(-i t_KJ / hbar): per-dimension J phases,
/// per-dimension K phases and the constant term.
struct ShiftPhases {
  std::vector<std::vector<cplx>> j_phase;
  std::vector<std::vector<cplx>> k_phase;
  cplx constant;
};
ShiftPhases shift_phases(const GridSpec& grid);

}  // namespace detail
}  // namespace movgrid
