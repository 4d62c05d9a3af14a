#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace movgrid {

/// The admissible multi-indices I = (i_1, ..., i_D), 0 <= i_l < N_l, of a
/// tensor-product grid. Flat storage is row-major: the last index is fastest.
class MultiIndexSet {
 public:
  MultiIndexSet() = default;
  explicit MultiIndexSet(std::vector<std::size_t> counts);

  std::size_t dims() const noexcept { return counts_.size(); }
  const std::vector<std::size_t>& counts() const noexcept { return counts_; }
  std::size_t count(std::size_t l) const { return counts_.at(l); }
  std::size_t size() const noexcept { return size_; }
  std::size_t stride(std::size_t l) const { return strides_.at(l); }

  /// Number of 1-D lines along the last dimension (size() / N_D).
  std::size_t line_count() const noexcept { return counts_.empty() ? 0 : size_ / counts_.back(); }

  std::size_t flatten(std::span<const std::size_t> index) const;
  void unflatten(std::size_t flat, std::span<std::size_t> index) const;

  /// Visits every multi-index in row-major order.
  template <class F>
  void for_each(F&& f) const {
    std::vector<std::size_t> index(dims(), 0);
    for (std::size_t flat = 0; flat < size_; ++flat) {
      f(std::span<const std::size_t>(index), flat);
      for (std::size_t l = dims(); l-- > 0;) {
        if (++index[l] < counts_[l]) break;
        index[l] = 0;
      }
    }
  }

  bool operator==(const MultiIndexSet& other) const { return counts_ == other.counts_; }

 private:
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

enum class Space { position, momentum };

/// Geometry of a phase-space grid: the moving frame of a wavefunction.
///
/// Point i of dimension l sits at x_ctr,l + (i - N_l/2) dx_l, for x = q or p,
/// and dq_l * dp_l = 2 pi hbar / N_l holds by construction. Centers are
/// arbitrary reals; they are never snapped to the lattice.
class GridSpec {
 public:
  GridSpec() = default;

  const MultiIndexSet& index_set() const noexcept { return index_set_; }
  std::size_t dims() const noexcept { return index_set_.dims(); }
  std::size_t size() const noexcept { return index_set_.size(); }
  const std::vector<std::size_t>& counts() const noexcept { return index_set_.counts(); }

  const std::vector<double>& q_ctr() const noexcept { return q_ctr_; }
  const std::vector<double>& p_ctr() const noexcept { return p_ctr_; }
  const std::vector<double>& dq() const noexcept { return dq_; }
  const std::vector<double>& dp() const noexcept { return dp_; }
  const std::vector<double>& center(Space s) const noexcept { return s == Space::position ? q_ctr_ : p_ctr_; }
  const std::vector<double>& spacing(Space s) const noexcept { return s == Space::position ? dq_ : dp_; }
  double hbar() const noexcept { return hbar_; }

  /// Coordinate of point i along dimension l.
  double coordinate(Space s, std::size_t l, double i) const;

  /// Copies with one center replaced. Sizes must match dims().
  GridSpec with_q_ctr(std::span<const double> q_ctr) const;
  GridSpec with_p_ctr(std::span<const double> p_ctr) const;

  /// Same index set and spacings (centers may differ).
  bool same_lattice(const GridSpec& other) const;
  /// Same lattice and bit-identical centers.
  bool operator==(const GridSpec& other) const;

 private:
  friend GridSpec make_grid(std::span<const std::size_t>, std::span<const double>, std::span<const double>,
                            std::span<const double>, double);

  MultiIndexSet index_set_;
  std::vector<double> q_ctr_, p_ctr_, dq_, dp_;
  double hbar_ = 1.0;
};

/// Builds a grid from counts, position center and spacing, and momentum
/// center; dp_l = 2 pi hbar / (N_l dq_l).
/// Throws InvalidArgument naming the offending dimension.
GridSpec make_grid(std::span<const std::size_t> counts, std::span<const double> q_ctr, std::span<const double> dq,
                   std::span<const double> p_ctr, double hbar = 1.0);

/// Grid whose position cell is [q_min_l, q_max_l): dq_l = (q_max_l - q_min_l)/N_l
/// and the center is the cell midpoint (index N_l/2 for even N_l).
GridSpec make_grid_from_ranges(std::span<const std::size_t> counts, std::span<const double> q_min,
                               std::span<const double> q_max, std::span<const double> p_ctr, double hbar = 1.0);

/// Grid points x_ctr,l + (i - N_l/2) dx_l for i = 0..N_l-1 (l is 0-based).
std::vector<double> axis_coordinates(const GridSpec& grid, Space which, std::size_t l);

}  // namespace movgrid
