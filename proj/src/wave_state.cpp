#include "movgrid/wave_state.hpp"

#include <cmath>
#include <string>

#include "lines.hpp"
#include "movgrid/errors.hpp"

namespace movgrid {

WaveState::WaveState(GridSpec grid, Representation rep)
    : grid_(std::move(grid)), rep_(rep), amplitudes_(grid_.size(), cplx{0.0, 0.0}) {}

WaveState::WaveState(GridSpec grid, Representation rep, Amplitudes amplitudes)
    : grid_(std::move(grid)), rep_(rep), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != grid_.size())
    throw InvalidArgument("amplitude count " + std::to_string(amplitudes_.size()) + " does not match grid size " +
                          std::to_string(grid_.size()));
}

void WaveState::reframe(GridSpec grid, Representation rep) {
  if (!grid.same_lattice(grid_)) throw IncompatibleGrid("reframe requires identical counts and spacings");
  grid_ = std::move(grid);
  rep_ = rep;
}

double norm(const WaveState& state) {
  const auto& set = state.grid().index_set();
  const std::size_t n_last = set.counts().back();
  const auto amps = state.amplitudes();
  std::vector<double> partial(set.line_count());
  detail::for_each_line(set, [&](std::size_t line, std::span<const std::size_t>) {
    const cplx* a = amps.data() + line * n_last;
    double s = 0.0;
    for (std::size_t i = 0; i < n_last; ++i) s += std::norm(a[i]);
    partial[line] = s;
  });
  return std::sqrt(detail::pairwise_sum(partial));
}

bool all_finite(const WaveState& state) {
  for (const cplx& c : state.amplitudes())
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

}  // namespace movgrid
