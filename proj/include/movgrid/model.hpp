#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "movgrid/linalg.hpp"
#include "movgrid/wave_state.hpp"

namespace movgrid {

/// A separable Hamiltonian H = p^T m^{-1} p / 2 + V(q) with hbar = 1.
///
/// Construction validates the definition: inv_mass must be symmetric and
/// positive definite, and the analytic gradient must agree with central
/// differences of the potential at 16 seeded points of the sample box.
class Model {
 public:
  using Potential = std::function<double(std::span<const double>)>;
  using Gradient = std::function<void(std::span<const double>, std::span<double>)>;
  /// Batched evaluation along one grid line: q holds the leading coordinates
  /// (its last entry is ignored), the last coordinate runs over `last_axis`.
  /// Writes V to v[i] and, unless `grad` is empty, the gradient to
  /// grad[i * dims + l].
  using LineEvaluator = std::function<void(std::span<const double> q, std::span<const double> last_axis,
                                           std::span<double> v, std::span<double> grad)>;

  struct Definition {
    std::string label;
    Matrix inv_mass;
    Potential potential;
    Gradient gradient;  // may be empty; adaptive propagation then throws
    LineEvaluator line_evaluator;  // optional fast path; must match potential/gradient
    /// Location of the potential minimum, if the model has one.
    std::optional<std::vector<double>> minimum;
    /// Exact Hessian at the minimum, if known in closed form.
    std::optional<Matrix> hessian_at_minimum;
    /// Box used for the gradient self-check.
    std::vector<double> sample_lo, sample_hi;
  };

  explicit Model(Definition def);

  const std::string& label() const noexcept { return def_.label; }
  std::size_t dims() const noexcept { return def_.inv_mass.size(); }
  const Matrix& inv_mass() const noexcept { return def_.inv_mass; }
  bool diagonal_mass() const noexcept { return diagonal_mass_; }

  double potential(std::span<const double> q) const { return def_.potential(q); }
  bool has_gradient() const noexcept { return static_cast<bool>(def_.gradient); }
  /// Throws UnsupportedModel when the model has no analytic gradient.
  void gradient(std::span<const double> q, std::span<double> out) const;
  /// Potential (and gradient, if `grad` is non-empty) along one line; see
  /// LineEvaluator. Falls back to pointwise calls.
  void evaluate_line(std::span<const double> q, std::span<const double> last_axis, std::span<double> v,
                     std::span<double> grad) const;

  const std::optional<std::vector<double>>& minimum() const noexcept { return def_.minimum; }
  const std::optional<Matrix>& hessian_at_minimum() const noexcept { return def_.hessian_at_minimum; }

  /// Kinetic energy p^T m^{-1} p / 2.
  double kinetic(std::span<const double> p) const;

 private:
  Definition def_;
  bool diagonal_mass_ = false;
};

struct HarmonicParams {
  Matrix K;
  std::vector<double> q0;
  std::vector<double> omegas;

  /// The three-dimensional coupled oscillator used as the main benchmark.
  static HarmonicParams table_one();
};

/// V(q) = (q - q0)^T K (q - q0) / 2 with inv_mass = diag(omegas).
Model harmonic_excited(const HarmonicParams& params);

/// Collinear He-H2 model: Morse well in q1 plus exponential repulsion in q2 - q1.
Model secrest_johnson();

/// Coupled Henon-Heiles potential with unit masses and kappa = 1.
Model henon_heiles(std::size_t dims, double lambda = 0.111803);

/// Paper-default initial wavepacket for a model label ("harmonic",
/// "scattering", "henon_heiles") sampled on `grid`.
WaveState initial_state_for(const std::string& label, const GridSpec& grid);

}  // namespace movgrid
