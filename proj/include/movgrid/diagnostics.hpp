#pragma once

#include <functional>
#include <span>
#include <vector>

#include "movgrid/composition.hpp"
#include "movgrid/model.hpp"
#include "movgrid/propagator.hpp"
#include "movgrid/wave_state.hpp"

namespace movgrid {

struct ReversibilityResult {
  double distance = 0.0;
  /// True when the forward-backward state ended on a different frame and was
  /// resampled onto the initial grid before differencing.
  bool resampled = false;
};

/// ||psi_fb - psi_0|| after n_steps at +dt followed by n_steps at -dt.
/// `forward_observer`, if set, sees the forward run every `observe_every`
/// steps.
ReversibilityResult reversibility_error(const WaveState& initial, const Model& model, StepMode mode,
                                        const CompositionScheme& scheme, double dt, std::size_t n_steps,
                                        const std::function<void(std::size_t, const WaveState&)>& forward_observer = {},
                                        std::size_t observe_every = 1);

struct ConvergenceTable {
  int nominal_order = 2;
  /// dts[j] = dt_max / 2^j; errors[j] = ||psi(dts[j]) - psi(dts[j] / 2)|| at t_f
  /// (NaN when either run failed).
  std::vector<double> dts;
  std::vector<double> errors;
  std::vector<bool> used_in_fit;
  /// Least-squares slope of log(error) vs log(dt) over the fitted rows; NaN
  /// if fewer than 4 rows qualify.
  double fitted_order = 0.0;
  /// Geometric mean of the errors below the fitted segment; NaN when the
  /// smallest dt is still above the floor.
  double floor = 0.0;
};

/// Propagates `initial` to t_f with dt_max / 2^j for j = 0..n_halvings and
/// tabulates successive differences (n_halvings rows). Adaptive final states
/// are resampled onto the finer run's frame before differencing. The fit uses
/// the longest run of consecutive rows whose error ratio is at least
/// 2^{order/2}; smaller ratios mark the pre-asymptotic regime or the floor.
ConvergenceTable convergence_study(const WaveState& initial, const Model& model, StepMode mode,
                                   const CompositionScheme& scheme, double dt_max, std::size_t n_halvings,
                                   double t_f);

/// Slope fit shared by convergence_study; exposed for testing.
void fit_order(ConvergenceTable& table);

/// 2 / Omega_max where Omega_max^2 is the largest eigenvalue of
/// L^T H L with inv_mass = L L^T and H the Hessian at the model's minimum
/// (exact if provided, else central differences of the gradient).
/// Throws UnsupportedModel when the model has no minimum.
double verlet_threshold(const Model& model);

/// <reference|psi_t> for each state, resampling states that are not on the
/// reference frame.
std::vector<cplx> autocorrelation(std::span<const WaveState> states, const WaveState& reference);

struct SpectrumPoint {
  double energy;
  double intensity;
};

/// I(E) = Re sum_n w_n exp(i E t_n / hbar) f(t_n) C(t_n) dt_sample with
/// trapezoid weights w_n, t_n = n dt_sample and f(t) = exp(-(t / t_damp)^2)
/// (no damping when t_damp <= 0). The mesh runs from e_min to e_max with
/// spacing 2 pi hbar / (4 T), T = (n - 1) dt_sample; by default e_max is the
/// Nyquist energy pi hbar / dt_sample. Intensities are unnormalized.
std::vector<SpectrumPoint> spectrum(std::span<const cplx> autocorr, double dt_sample, double t_damp,
                                    double e_min = 0.0, double e_max = -1.0, double hbar = 1.0);

}  // namespace movgrid
