#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "movgrid/errors.hpp"
#include "movgrid/grid.hpp"

namespace movgrid::detail {

inline constexpr std::size_t kMaxDims = 16;

/// Calls f(line, index) for every 1-D line along the last dimension. `index`
/// holds the multi-index of the first point of the line. Lines may be visited
/// concurrently; each line is handled by exactly one thread, so per-element
/// results do not depend on the thread count.
template <class F>
void for_each_line(const MultiIndexSet& set, F&& f) {
  const std::size_t dims = set.dims();
  if (dims > kMaxDims) throw InvalidArgument("at most 16 dimensions are supported");
  const std::size_t lines = set.line_count();
  const std::size_t last = set.counts().back();
#pragma omp parallel
  {
    std::size_t begin = 0, end = lines;
#ifdef _OPENMP
    const std::size_t threads = static_cast<std::size_t>(omp_get_num_threads());
    const std::size_t me = static_cast<std::size_t>(omp_get_thread_num());
    begin = lines * me / threads;
    end = lines * (me + 1) / threads;
#endif
    if (begin < end) {
      std::array<std::size_t, kMaxDims> index{};
      set.unflatten(begin * last, std::span<std::size_t>(index.data(), dims));
      for (std::size_t line = begin; line < end; ++line) {
        f(line, std::span<const std::size_t>(index.data(), dims));
        // Odometer step over the leading dimensions.
        for (std::size_t l = dims - 1; l-- > 0;) {
          if (++index[l] < set.counts()[l]) break;
          index[l] = 0;
        }
      }
    }
  }
}

/// Pairwise (cascade) summation with a fixed tree shape.
inline double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 32) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

/// Sums `components` per-line partial results: partial[line * components + c].
inline std::vector<double> reduce_lines(const std::vector<double>& partial, std::size_t components) {
  const std::size_t lines = components ? partial.size() / components : 0;
  std::vector<double> column(lines), out(components);
  for (std::size_t c = 0; c < components; ++c) {
    for (std::size_t line = 0; line < lines; ++line) column[line] = partial[line * components + c];
    out[c] = pairwise_sum(column);
  }
  return out;
}

}  // namespace movgrid::detail

namespace movgrid::detail {

/// Per-dimension coordinate axes of a grid in one space.
inline std::vector<std::vector<double>> all_axes(const GridSpec& grid, Space which) {
  std::vector<std::vector<double>> axes(grid.dims());
  for (std::size_t l = 0; l < grid.dims(); ++l) axes[l] = axis_coordinates(grid, which, l);
  return axes;
}

/// Calls f(line, flat, x) for every grid point, where x holds the physical
/// coordinates of the point. Parallel over lines like for_each_line.
template <class F>
void for_each_point(const GridSpec& grid, Space which, F&& f) {
  const auto axes = all_axes(grid, which);
  const std::size_t dims = grid.dims();
  const std::size_t n_last = grid.counts().back();
  for_each_line(grid.index_set(), [&](std::size_t line, std::span<const std::size_t> index) {
    std::array<double, kMaxDims> x{};
    for (std::size_t l = 0; l + 1 < dims; ++l) x[l] = axes[l][index[l]];
    const std::size_t base = line * n_last;
    for (std::size_t i = 0; i < n_last; ++i) {
      x[dims - 1] = axes[dims - 1][i];
      f(line, base + i, std::span<const double>(x.data(), dims));
    }
  });
}

}  // namespace movgrid::detail
