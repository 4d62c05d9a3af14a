#pragma once

#include <span>

#include "movgrid/aligned.hpp"
#include "movgrid/grid.hpp"

namespace movgrid {

enum class Representation { position, momentum };

/// A wavefunction sampled on a moving tensor-product grid.
///
/// Amplitudes use the scaled convention c^J = sqrt(prod_l dx_l) * psi(x^J),
/// where x is q in the position representation and p in the momentum one.
/// With this scaling the coefficient 2-norm is the physical norm and the
/// representation change is exactly the unitary shifted DFT. It differs from
/// psi(x^J)/sqrt(C_x) only by a constant common to both representations.
///
/// Operations take a WaveState by value and return a new one; pass an
/// rvalue to reuse the buffer.
class WaveState {
 public:
  WaveState() = default;
  WaveState(GridSpec grid, Representation rep);
  WaveState(GridSpec grid, Representation rep, Amplitudes amplitudes);

  const GridSpec& grid() const noexcept { return grid_; }
  Representation representation() const noexcept { return rep_; }
  std::size_t size() const noexcept { return amplitudes_.size(); }

  std::span<const cplx> amplitudes() const noexcept { return amplitudes_; }
  std::span<cplx> amplitudes() noexcept { return amplitudes_; }

  /// Replaces the frame. The new grid must share counts and spacings.
  void reframe(GridSpec grid, Representation rep);

 private:
  GridSpec grid_;
  Representation rep_ = Representation::position;
  Amplitudes amplitudes_;
};

/// Coefficient 2-norm (pairwise summation, independent of thread count).
double norm(const WaveState& state);

/// True when every amplitude is finite.
bool all_finite(const WaveState& state);

}  // namespace movgrid
