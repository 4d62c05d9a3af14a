#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "movgrid/composition.hpp"
#include "movgrid/errors.hpp"
#include "movgrid/model.hpp"
#include "movgrid/series.hpp"
#include "movgrid/wave_state.hpp"

namespace movgrid {

enum class GridMode { fixed, naive_adaptive, reversible_adaptive };
enum class Flavor { tvt, vtv };

struct StepMode {
  GridMode grid = GridMode::reversible_adaptive;
  Flavor flavor = Flavor::tvt;
};

/// psi^J *= exp(-i dt V(q^J) / hbar); the grid does not move.
/// Throws ModelDomainError if V is not finite at a grid point.
WaveState step_V_fixed(WaveState state, double dt, const Model& model);

/// Kinetic phase exp(-i dt T(p^K) / hbar) applied in momentum space with
/// unchanged centers.
WaveState step_T_fixed(WaveState state, double dt, const Model& model);

/// step_V_fixed followed by p_ctr -= dt <grad V>, with the expectation taken
/// over |psi|^2 before the phase is applied (the two are identical since the
/// phase does not change |psi|).
WaveState step_V_adaptive(WaveState state, double dt, const Model& model);

/// Transform with the current centers, apply the kinetic phase, move
/// q_ctr += dt m^{-1} p_ctr, and transform back onto the moved q-grid.
WaveState step_T_adaptive(WaveState state, double dt, const Model& model);

/// One symmetric second-order step (TVT or VTV). Adaptive sub-flows are used
/// only in reversible_adaptive mode; otherwise the grid is frozen.
WaveState strang_step(WaveState state, double dt, const Model& model, StepMode mode);

/// Frozen-grid composed step of length dt with `inner`, then recentering on
/// the new <q> and <p> via two representation changes.
WaveState naive_step(WaveState state, double dt, const Model& model, const CompositionScheme& inner,
                     Flavor flavor = Flavor::tvt);

/// One step of the composition: Strang steps of gamma_k dt in sequence, or
/// a single naive_step with the same scheme as its inner propagator.
WaveState composed_step(WaveState state, double dt, const Model& model, StepMode mode,
                        const CompositionScheme& scheme);

struct PropagationReport {
  WaveState final_state;
  /// Sample 0 is the initial state at t = 0; then one sample every
  /// `sample_every` steps.
  DiagnosticSeries series;
  std::size_t steps_completed = 0;
  double wall_seconds = 0.0;
  std::uint64_t fft_count = 0;
  std::uint64_t potential_evaluations = 0;
};

struct PropagateOptions {
  /// Adds <reference|psi_t> (after resampling psi_t onto the reference
  /// frame when the grids differ) to every sample.
  const WaveState* overlap_reference = nullptr;
  /// Skip the energy column (saves two transforms per sample).
  bool record_energy = true;
  /// Called after every sampled step with the step index and state.
  std::function<void(std::size_t, const WaveState&)> observer;
  /// Warn when |gamma_k| dt reaches the Verlet threshold.
  bool stability_warning = true;
};

/// Thrown when the amplitudes become non-finite. Carries the report up to
/// the last good step.
class PropagationFailure : public NumericalFailure {
 public:
  PropagationFailure(const std::string& what, PropagationReport partial)
      : NumericalFailure(what), partial_(std::move(partial)) {}
  const PropagationReport& partial() const noexcept { return partial_; }

 private:
  PropagationReport partial_;
};

/// Applies n_steps composed steps. Backward propagation is the same call
/// with a negative dt.
PropagationReport propagate(WaveState state, const Model& model, StepMode mode, const CompositionScheme& scheme,
                            double dt, std::size_t n_steps, std::size_t sample_every = 1,
                            const PropagateOptions& options = {});

namespace detail {
/// Number of potential evaluations on the calling thread.
std::uint64_t& potential_counter() noexcept;
}  // namespace detail

}  // namespace movgrid
