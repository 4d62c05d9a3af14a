#include "movgrid/wavefunction.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lines.hpp"
#include "movgrid/errors.hpp"
#include "movgrid/log.hpp"
#include "movgrid/model.hpp"
#include "movgrid/transform.hpp"

namespace movgrid {
namespace {

void require_same_frame(const WaveState& a, const WaveState& b, const char* what) {
  if (!(a.grid() == b.grid()) || a.representation() != b.representation())
    throw IncompatibleGrid(std::string(what) + " needs states on identical grids; resample first");
}

// Largest ratio |f(edge)| / |f(peak)| of a 1-D Gaussian magnitude profile
// exp(-(x - c)^2 / (2 s^2)) over the two edge points of an axis.
double edge_ratio(const std::vector<double>& axis, double c, double s) {
  const double a = (axis.front() - c) / s, b = (axis.back() - c) / s;
  return std::exp(-0.5 * std::min(a * a, b * b));
}

}  // namespace

WaveState gaussian_state(const GridSpec& grid, std::span<const double> center_q, std::span<const double> center_p,
                         std::span<const double> widths) {
  const std::size_t d = grid.dims();
  if (center_q.size() != d || center_p.size() != d || widths.size() != d)
    throw InvalidArgument("Gaussian parameters must have one entry per grid dimension");
  const double hbar = grid.hbar();

  std::vector<std::vector<cplx>> factors(d);
  for (std::size_t l = 0; l < d; ++l) {
    if (!(widths[l] > 0.0)) throw InvalidArgument("dimension " + std::to_string(l + 1) + ": width must be positive");
    const auto q = axis_coordinates(grid, Space::position, l);
    const double w = widths[l];
    const double prefactor = std::pow(std::numbers::pi * w * w, -0.25) * std::sqrt(grid.dq()[l]);
    factors[l].resize(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double x = q[i] - center_q[l];
      factors[l][i] = std::polar(prefactor * std::exp(-x * x / (2.0 * w * w)), center_p[l] * x / hbar);
    }

    const double q_edge = edge_ratio(q, center_q[l], w);
    const double p_edge = edge_ratio(axis_coordinates(grid, Space::momentum, l), center_p[l], hbar / w);
    if (q_edge > 1e-7 || p_edge > 1e-7)
      warn("Gaussian truncated by the grid in dimension " + std::to_string(l + 1) +
           " (edge/peak amplitude: q " + std::to_string(q_edge) + ", p " + std::to_string(p_edge) + ")");
  }

  WaveState state(grid, Representation::position, Amplitudes(grid.size(), cplx{1.0, 0.0}));
  detail::multiply_separable(state.amplitudes(), grid.index_set(), factors, cplx{1.0, 0.0});
  const double n = norm(state);
  if (!(n > 0.0)) throw DegenerateState("Gaussian has zero norm on this grid");
  for (cplx& c : state.amplitudes()) c /= n;
  return state;
}

Overlap inner_product(const WaveState& a, const WaveState& b) {
  require_same_frame(a, b, "inner_product");
  const auto& set = a.grid().index_set();
  const std::size_t n_last = set.counts().back();
  const auto x = a.amplitudes(), y = b.amplitudes();
  std::vector<double> partial(2 * set.line_count());
  detail::for_each_line(set, [&](std::size_t line, std::span<const std::size_t>) {
    cplx s{0.0, 0.0};
    for (std::size_t i = line * n_last; i < (line + 1) * n_last; ++i) s += std::conj(x[i]) * y[i];
    partial[2 * line] = s.real();
    partial[2 * line + 1] = s.imag();
  });
  const auto sums = detail::reduce_lines(partial, 2);
  return {sums[0], sums[1]};
}

double distance(const WaveState& a, const WaveState& b) {
  require_same_frame(a, b, "distance");
  const auto& set = a.grid().index_set();
  const std::size_t n_last = set.counts().back();
  const auto x = a.amplitudes(), y = b.amplitudes();
  std::vector<double> partial(set.line_count());
  detail::for_each_line(set, [&](std::size_t line, std::span<const std::size_t>) {
    double s = 0.0;
    for (std::size_t i = line * n_last; i < (line + 1) * n_last; ++i) s += std::norm(x[i] - y[i]);
    partial[line] = s;
  });
  return std::sqrt(detail::pairwise_sum(partial));
}

namespace detail {

Moments first_moments(const WaveState& state) {
  const GridSpec& grid = state.grid();
  const Space space = state.representation() == Representation::position ? Space::position : Space::momentum;
  const std::size_t d = grid.dims();
  const std::size_t n_last = grid.counts().back();
  // Moments of the offsets from the center keep full precision far from the origin.
  std::vector<std::vector<double>> offsets(d);
  for (std::size_t l = 0; l < d; ++l) {
    const std::size_t n = grid.counts()[l];
    offsets[l].resize(n);
    for (std::size_t i = 0; i < n; ++i)
      offsets[l][i] = (static_cast<double>(i) - static_cast<double>(n) / 2.0) * grid.spacing(space)[l];
  }
  const auto amps = state.amplitudes();
  const std::size_t comps = d + 1;
  std::vector<double> partial(comps * grid.index_set().line_count());
  for_each_line(grid.index_set(), [&](std::size_t line, std::span<const std::size_t> index) {
    double w = 0.0, last = 0.0;
    const cplx* a = amps.data() + line * n_last;
    for (std::size_t i = 0; i < n_last; ++i) {
      const double p = std::norm(a[i]);
      w += p;
      last += p * offsets[d - 1][i];
    }
    double* out = partial.data() + line * comps;
    out[0] = w;
    for (std::size_t l = 0; l + 1 < d; ++l) out[1 + l] = w * offsets[l][index[l]];
    out[d] = last;
  });
  const auto sums = reduce_lines(partial, comps);
  if (!(sums[0] > 0.0) || !std::isfinite(sums[0])) throw DegenerateState("state has zero or non-finite norm");
  Moments m{sums[0], std::vector<double>(d)};
  for (std::size_t l = 0; l < d; ++l) m.mean[l] = grid.center(space)[l] + sums[1 + l] / sums[0];
  return m;
}

}  // namespace detail

std::vector<double> expect_position(const WaveState& state) {
  if (state.representation() != Representation::position)
    throw InvalidArgument("expect_position expects a position-representation state");
  return detail::first_moments(state).mean;
}

std::vector<double> expect_momentum(const WaveState& state) {
  if (state.representation() == Representation::momentum) return detail::first_moments(state).mean;
  return detail::first_moments(to_momentum(state)).mean;
}

double expect_energy(const WaveState& state, const Model& model) {
  if (model.dims() != state.grid().dims()) throw InvalidArgument("model and state dimensions differ");
  const WaveState pos = state.representation() == Representation::position ? state : to_position(state);
  const WaveState mom = state.representation() == Representation::momentum ? state : to_momentum(state);

  auto weighted = [](const WaveState& s, Space space, auto&& value) {
    const std::size_t lines = s.grid().index_set().line_count();
    std::vector<double> partial(2 * lines, 0.0);
    const auto amps = s.amplitudes();
    // Lines are visited by exactly one thread, so accumulating into the line slot is race free.
    detail::for_each_point(s.grid(), space, [&](std::size_t line, std::size_t flat, std::span<const double> x) {
      const double w = std::norm(amps[flat]);
      partial[2 * line] += w;
      partial[2 * line + 1] += w * value(x);
    });
    const auto sums = detail::reduce_lines(partial, 2);
    if (!(sums[0] > 0.0) || !std::isfinite(sums[0])) throw DegenerateState("state has zero or non-finite norm");
    return sums[1] / sums[0];
  };
  const double v = weighted(pos, Space::position, [&](std::span<const double> q) { return model.potential(q); });
  const double t = weighted(mom, Space::momentum, [&](std::span<const double> p) { return model.kinetic(p); });
  return v + t;
}

WaveState resample(const WaveState& state, const GridSpec& target, ExtrapolationPolicy policy) {
  const GridSpec& src = state.grid();
  const std::size_t d = src.dims();
  if (target.dims() != d) throw IncompatibleGrid("resample target has a different dimension");
  if (target.hbar() != src.hbar()) throw IncompatibleGrid("resample target has a different hbar");
  const WaveState mom = state.representation() == Representation::momentum ? state : to_momentum(state);
  const double hbar = src.hbar();

  // Per-dimension evaluation matrices E_l[j', k] (row-major, N'_l x N_l).
  std::vector<std::vector<cplx>> eval(d);
  std::size_t outside = 0;
  for (std::size_t l = 0; l < d; ++l) {
    const std::size_t ns = src.counts()[l], nt = target.counts()[l];
    const auto p = axis_coordinates(src, Space::momentum, l);
    const auto qt = axis_coordinates(target, Space::position, l);
    const double scale = std::sqrt(target.dq()[l] / src.dq()[l]) / std::sqrt(static_cast<double>(ns));
    eval[l].assign(nt * ns, cplx{0.0, 0.0});
    for (std::size_t j = 0; j < nt; ++j) {
      const double u = (qt[j] - src.q_ctr()[l]) / src.dq()[l] + static_cast<double>(ns) / 2.0;
      // Accept the closed interval of half a spacing around the samples, so a
      // refinement of the same cell keeps its last point.
      if (u < -0.5 - 1e-9 || u > static_cast<double>(ns) - 0.5 + 1e-9) {
        ++outside;
        continue;
      }
      for (std::size_t k = 0; k < ns; ++k) eval[l][j * ns + k] = std::polar(scale, p[k] * qt[j] / hbar);
    }
  }
  if (outside > 0 && policy == ExtrapolationPolicy::warn)
    warn("resample: " + std::to_string(outside) + " target axis points lie outside the source cell and were zeroed");

  // Sequential mode products, one dimension at a time.
  std::vector<std::size_t> shape = src.counts();
  std::vector<cplx> current(mom.amplitudes().begin(), mom.amplitudes().end());
  for (std::size_t l = 0; l < d; ++l) {
    const std::size_t ns = shape[l], nt = target.counts()[l];
    std::size_t outer = 1, inner = 1;
    for (std::size_t m = 0; m < l; ++m) outer *= shape[m];
    for (std::size_t m = l + 1; m < d; ++m) inner *= shape[m];
    std::vector<cplx> next(outer * nt * inner, cplx{0.0, 0.0});
    const auto& e = eval[l];
#pragma omp parallel for schedule(static)
    for (long long a = 0; a < static_cast<long long>(outer); ++a) {
      const cplx* in = current.data() + static_cast<std::size_t>(a) * ns * inner;
      cplx* out = next.data() + static_cast<std::size_t>(a) * nt * inner;
      for (std::size_t j = 0; j < nt; ++j) {
        cplx* row = out + j * inner;
        for (std::size_t k = 0; k < ns; ++k) {
          const cplx w = e[j * ns + k];
          if (w == cplx{0.0, 0.0}) continue;
          const cplx* col = in + k * inner;
          for (std::size_t b = 0; b < inner; ++b) row[b] += w * col[b];
        }
      }
    }
    current = std::move(next);
    shape[l] = nt;
  }
  return WaveState(target, Representation::position, Amplitudes(current.begin(), current.end()));
}

}  // namespace movgrid
