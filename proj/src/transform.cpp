#include "movgrid/transform.hpp"

#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "lines.hpp"
#include "movgrid/errors.hpp"

namespace movgrid {
namespace detail {

void multiply_separable(std::span<cplx> amplitudes, const MultiIndexSet& index_set,
                        const std::vector<std::vector<cplx>>& factors, cplx scale) {
  const std::size_t dims = index_set.dims();
  const std::size_t n_last = index_set.counts().back();
  const std::vector<cplx>& last = factors[dims - 1];
  for_each_line(index_set, [&](std::size_t line, std::span<const std::size_t> index) {
    cplx prefix = scale;
    for (std::size_t l = 0; l + 1 < dims; ++l) prefix *= factors[l][index[l]];
    // Interleaved re/im arithmetic on restrict pointers so the loop vectorizes.
    double* __restrict a = reinterpret_cast<double*>(amplitudes.data() + line * n_last);
    const double* __restrict f = reinterpret_cast<const double*>(last.data());
    const double pr = prefix.real(), pi = prefix.imag();
    for (std::size_t i = 0; i < n_last; ++i) {
      const double fr = pr * f[2 * i] - pi * f[2 * i + 1];
      const double fi = pr * f[2 * i + 1] + pi * f[2 * i];
      const double ar = a[2 * i], ai = a[2 * i + 1];
      a[2 * i] = ar * fr - ai * fi;
      a[2 * i + 1] = ar * fi + ai * fr;
    }
  });
}

ShiftPhases shift_phases(const GridSpec& grid) {
  const std::size_t dims = grid.dims();
  const double hbar = grid.hbar();
  ShiftPhases out;
  out.j_phase.resize(dims);
  out.k_phase.resize(dims);
  double constant_phase = 0.0;
  for (std::size_t l = 0; l < dims; ++l) {
    const std::size_t n = grid.counts()[l];
    const double half = static_cast<double>(n) / 2.0;
    const double qc = grid.q_ctr()[l], pc = grid.p_ctr()[l];
    const double dq = grid.dq()[l], dp = grid.dp()[l];
    out.j_phase[l].resize(n);
    out.k_phase[l].resize(n);
    // The -pi*hbar*(j+k) part of t_KJ contributes (-1)^j and (-1)^k.
    for (std::size_t i = 0; i < n; ++i) {
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      const double x = static_cast<double>(i);
      out.j_phase[l][i] = std::polar(sign, -pc * x * dq / hbar);
      out.k_phase[l][i] = std::polar(sign, -qc * x * dp / hbar);
    }
    constant_phase += (pc - dp * half) * (qc - dq * half);
  }
  out.constant = std::polar(1.0, -constant_phase / hbar);
  return out;
}

namespace {

std::vector<std::vector<cplx>> conjugated(std::vector<std::vector<cplx>> factors) {
  for (auto& f : factors)
    for (auto& c : f) c = std::conj(c);
  return factors;
}

}  // namespace
}  // namespace detail

WaveState to_momentum(WaveState state, std::span<const double> target_p_ctr) {
  if (state.representation() != Representation::position)
    throw InvalidArgument("to_momentum expects a position-representation state");
  GridSpec grid = state.grid().with_p_ctr(target_p_ctr);
  const auto phases = detail::shift_phases(grid);
  const auto& set = grid.index_set();
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(grid.size()));

  auto amps = state.amplitudes();
  detail::multiply_separable(amps, set, phases.j_phase, cplx{1.0, 0.0});
  detail::fft_inplace(amps, set.counts(), detail::FftSign::forward);
  detail::multiply_separable(amps, set, phases.k_phase, phases.constant * inv_sqrt_n);
  state.reframe(std::move(grid), Representation::momentum);
  return state;
}

WaveState to_position(WaveState state, std::span<const double> target_q_ctr) {
  if (state.representation() != Representation::momentum)
    throw InvalidArgument("to_position expects a momentum-representation state");
  GridSpec grid = state.grid().with_q_ctr(target_q_ctr);
  const auto phases = detail::shift_phases(grid);
  const auto& set = grid.index_set();
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(grid.size()));

  auto amps = state.amplitudes();
  detail::multiply_separable(amps, set, detail::conjugated(phases.k_phase), cplx{1.0, 0.0});
  detail::fft_inplace(amps, set.counts(), detail::FftSign::backward);
  detail::multiply_separable(amps, set, detail::conjugated(phases.j_phase), std::conj(phases.constant) * inv_sqrt_n);
  state.reframe(std::move(grid), Representation::position);
  return state;
}

WaveState to_momentum(WaveState state) {
  const std::vector<double> p = state.grid().p_ctr();
  return to_momentum(std::move(state), p);
}

WaveState to_position(WaveState state) {
  const std::vector<double> q = state.grid().q_ctr();
  return to_position(std::move(state), q);
}

}  // namespace movgrid
