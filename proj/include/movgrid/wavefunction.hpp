#pragma once

#include <span>
#include <vector>

#include "movgrid/wave_state.hpp"

namespace movgrid {

class Model;

/// <a|b>, conjugate-linear in `a`.
using Overlap = cplx;

/// Product of 1-D Gaussians
///   (pi w_l^2)^{-1/4} exp(-(q_l - q0_l)^2 / (2 w_l^2) + i p0_l (q_l - q0_l) / hbar)
/// sampled on the position grid and normalized to unit coefficient norm.
/// Warns when the amplitude at the edge of the q- or p-grid exceeds 1e-7 of
/// the peak.
WaveState gaussian_state(const GridSpec& grid, std::span<const double> center_q, std::span<const double> center_p,
                         std::span<const double> widths);

/// Plain coefficient dot product. With sqrt(dx)-scaled coefficients the grid
/// volume element is already absorbed, so this equals the grid inner product.
/// Throws IncompatibleGrid unless grids and representations are identical.
Overlap inner_product(const WaveState& a, const WaveState& b);

/// Coefficient 2-norm of a - b; same preconditions as inner_product.
double distance(const WaveState& a, const WaveState& b);

/// <q> normalized by the state norm. Position representation only.
std::vector<double> expect_position(const WaveState& state);

/// <p> on the momentum grid centered at the state's current p_ctr.
std::vector<double> expect_momentum(const WaveState& state);

/// <V> in position plus <T> in momentum, normalized by the state norm.
double expect_energy(const WaveState& state, const Model& model);

enum class ExtrapolationPolicy { warn, silent };

/// Evaluates the trigonometric interpolant of `state` at the position points
/// of `target`. Target points farther than half a spacing from the source
/// samples (outside the source's periodic cell) are set to zero (and reported when policy is warn). Returns a position-representation
/// state on `target`.
WaveState resample(const WaveState& state, const GridSpec& target,
                   ExtrapolationPolicy policy = ExtrapolationPolicy::warn);

namespace detail {

/// Normalized first moments and squared norm in the given representation.
struct Moments {
  double norm2;
  std::vector<double> mean;
};
Moments first_moments(const WaveState& state);

}  // namespace detail
}  // namespace movgrid
