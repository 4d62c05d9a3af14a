#include "movgrid/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "movgrid/errors.hpp"

namespace movgrid {

MultiIndexSet::MultiIndexSet(std::vector<std::size_t> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) throw InvalidArgument("multi-index set needs at least one dimension");
  strides_.assign(counts_.size(), 1);
  size_ = 1;
  for (std::size_t l = counts_.size(); l-- > 0;) {
    if (counts_[l] == 0) throw InvalidArgument("dimension " + std::to_string(l + 1) + ": count must be positive");
    strides_[l] = size_;
    size_ *= counts_[l];
  }
}

std::size_t MultiIndexSet::flatten(std::span<const std::size_t> index) const {
  if (index.size() != dims()) throw InvalidArgument("multi-index has wrong rank");
  std::size_t flat = 0;
  for (std::size_t l = 0; l < dims(); ++l) {
    if (index[l] >= counts_[l]) throw InvalidArgument("multi-index out of range in dimension " + std::to_string(l + 1));
    flat += index[l] * strides_[l];
  }
  return flat;
}

void MultiIndexSet::unflatten(std::size_t flat, std::span<std::size_t> index) const {
  for (std::size_t l = 0; l < dims(); ++l) {
    index[l] = flat / strides_[l];
    flat %= strides_[l];
  }
}

double GridSpec::coordinate(Space s, std::size_t l, double i) const {
  const double n = static_cast<double>(index_set_.count(l));
  return center(s)[l] + (i - n / 2.0) * spacing(s)[l];
}

GridSpec GridSpec::with_q_ctr(std::span<const double> q_ctr) const {
  if (q_ctr.size() != dims()) throw InvalidArgument("position center has wrong dimension");
  GridSpec g = *this;
  g.q_ctr_.assign(q_ctr.begin(), q_ctr.end());
  return g;
}

GridSpec GridSpec::with_p_ctr(std::span<const double> p_ctr) const {
  if (p_ctr.size() != dims()) throw InvalidArgument("momentum center has wrong dimension");
  GridSpec g = *this;
  g.p_ctr_.assign(p_ctr.begin(), p_ctr.end());
  return g;
}

bool GridSpec::same_lattice(const GridSpec& other) const {
  return index_set_ == other.index_set_ && dq_ == other.dq_ && dp_ == other.dp_ && hbar_ == other.hbar_;
}

bool GridSpec::operator==(const GridSpec& other) const {
  return same_lattice(other) && q_ctr_ == other.q_ctr_ && p_ctr_ == other.p_ctr_;
}

GridSpec make_grid(std::span<const std::size_t> counts, std::span<const double> q_ctr, std::span<const double> dq,
                   std::span<const double> p_ctr, double hbar) {
  const std::size_t d = counts.size();
  if (d == 0) throw InvalidArgument("grid needs at least one dimension");
  if (q_ctr.size() != d || dq.size() != d || p_ctr.size() != d)
    throw InvalidArgument("grid arrays must all have " + std::to_string(d) + " entries");
  if (!(hbar > 0.0)) throw InvalidArgument("hbar must be positive");
  for (std::size_t l = 0; l < d; ++l) {
    const std::string dim = "dimension " + std::to_string(l + 1);
    if (counts[l] < 2) throw InvalidArgument(dim + ": point count must be at least 2");
    if (!(dq[l] > 0.0) || !std::isfinite(dq[l])) throw InvalidArgument(dim + ": spacing must be positive");
    if (!std::isfinite(q_ctr[l]) || !std::isfinite(p_ctr[l])) throw InvalidArgument(dim + ": centers must be finite");
  }

  GridSpec g;
  g.index_set_ = MultiIndexSet(std::vector<std::size_t>(counts.begin(), counts.end()));
  g.q_ctr_.assign(q_ctr.begin(), q_ctr.end());
  g.p_ctr_.assign(p_ctr.begin(), p_ctr.end());
  g.dq_.assign(dq.begin(), dq.end());
  g.dp_.resize(d);
  g.hbar_ = hbar;
  for (std::size_t l = 0; l < d; ++l)
    g.dp_[l] = 2.0 * std::numbers::pi * hbar / (static_cast<double>(counts[l]) * dq[l]);
  return g;
}

GridSpec make_grid_from_ranges(std::span<const std::size_t> counts, std::span<const double> q_min,
                               std::span<const double> q_max, std::span<const double> p_ctr, double hbar) {
  const std::size_t d = counts.size();
  if (q_min.size() != d || q_max.size() != d) throw InvalidArgument("grid ranges must have one entry per dimension");
  std::vector<double> dq(d), q_ctr(d);
  for (std::size_t l = 0; l < d; ++l) {
    if (!(q_max[l] > q_min[l]))
      throw InvalidArgument("dimension " + std::to_string(l + 1) + ": range must satisfy q_min < q_max");
    dq[l] = (q_max[l] - q_min[l]) / static_cast<double>(counts[l]);
    // The center sits at index N/2, so the cell starts at q_ctr - (N/2) dq.
    q_ctr[l] = q_min[l] + static_cast<double>(counts[l]) / 2.0 * dq[l];
  }
  return make_grid(counts, q_ctr, dq, p_ctr, hbar);
}

std::vector<double> axis_coordinates(const GridSpec& grid, Space which, std::size_t l) {
  if (l >= grid.dims())
    throw InvalidArgument("dimension index " + std::to_string(l) + " out of range for a " +
                          std::to_string(grid.dims()) + "-D grid");
  const std::size_t n = grid.counts()[l];
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = grid.coordinate(which, l, static_cast<double>(i));
  return x;
}

}  // namespace movgrid
