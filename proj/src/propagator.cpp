#include "movgrid/propagator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>

#include "fft.hpp"
#include "lines.hpp"
#include "phase.hpp"
#include "movgrid/diagnostics.hpp"
#include "movgrid/log.hpp"
#include "movgrid/transform.hpp"
#include "movgrid/wavefunction.hpp"

namespace movgrid {
namespace detail {

std::uint64_t& potential_counter() noexcept {
  thread_local std::uint64_t count = 0;
  return count;
}

}  // namespace detail

namespace {

void require_position(const WaveState& state, const char* what) {
  if (state.representation() != Representation::position)
    throw InvalidArgument(std::string(what) + " expects a position-representation state");
}

void require_dims(const WaveState& state, const Model& model) {
  if (state.grid().dims() != model.dims())
    throw InvalidArgument("model is " + std::to_string(model.dims()) + "-D but the state is " +
                          std::to_string(state.grid().dims()) + "-D");
}

// Multiplies by exp(-i dt V / hbar). When `gradient_mean` is non-null the
// |psi|^2-weighted mean gradient is accumulated in the same pass, before the
// phase is applied.
void apply_potential_phase(WaveState& state, double dt, const Model& model, std::vector<double>* gradient_mean) {
  const GridSpec& grid = state.grid();
  const std::size_t d = grid.dims();
  const double factor = -dt / grid.hbar();
  const std::size_t comps = d + 1;
  std::vector<double> partial(gradient_mean ? comps * grid.index_set().line_count() : 0, 0.0);
  std::atomic<bool> bad{false};
  auto amps = state.amplitudes();

  const auto axes = detail::all_axes(grid, Space::position);
  const std::size_t n_last = grid.counts().back();
  detail::for_each_line(grid.index_set(), [&](std::size_t line, std::span<const std::size_t> index) {
    std::array<double, detail::kMaxDims> q{};
    for (std::size_t l = 0; l + 1 < d; ++l) q[l] = axes[l][index[l]];
    thread_local std::vector<double> v, g;
    v.resize(n_last);
    g.resize(gradient_mean ? n_last * d : 0);
    model.evaluate_line(std::span<const double>(q.data(), d), axes[d - 1], v, g);
    cplx* a = amps.data() + line * n_last;
    for (std::size_t i = 0; i < n_last; ++i) {
      if (!std::isfinite(v[i])) {
        bad.store(true, std::memory_order_relaxed);
        return;
      }
    }
    if (gradient_mean) {
      std::array<double, detail::kMaxDims + 1> sums{};
      for (std::size_t i = 0; i < n_last; ++i) {
        const double w = std::norm(a[i]);
        sums[0] += w;
        const double* gi = g.data() + i * d;
        for (std::size_t l = 0; l < d; ++l) sums[1 + l] += w * gi[l];
      }
      std::copy_n(sums.begin(), comps, partial.begin() + static_cast<std::ptrdiff_t>(line * comps));
    }
    detail::multiply_by_phase(a, v.data(), factor, n_last);
  });
  detail::potential_counter() += grid.size();
  if (bad) throw ModelDomainError("potential '" + model.label() + "' is not finite on the current grid");

  if (gradient_mean) {
    const auto sums = detail::reduce_lines(partial, comps);
    if (!(sums[0] > 0.0) || !std::isfinite(sums[0])) throw DegenerateState("state has zero or non-finite norm");
    gradient_mean->resize(d);
    for (std::size_t l = 0; l < d; ++l) (*gradient_mean)[l] = sums[1 + l] / sums[0];
  }
}

void apply_kinetic_phase(WaveState& mom, double dt, const Model& model) {
  const GridSpec& grid = mom.grid();
  const std::size_t d = grid.dims();
  const double factor = -dt / grid.hbar();
  if (model.diagonal_mass()) {
    std::vector<std::vector<cplx>> factors(d);
    for (std::size_t l = 0; l < d; ++l) {
      const double inv_m = model.inv_mass()(l, l);
      const auto p = axis_coordinates(grid, Space::momentum, l);
      factors[l].resize(p.size());
      for (std::size_t k = 0; k < p.size(); ++k) factors[l][k] = std::polar(1.0, factor * 0.5 * inv_m * p[k] * p[k]);
    }
    detail::multiply_separable(mom.amplitudes(), grid.index_set(), factors, cplx{1.0, 0.0});
    return;
  }
  auto amps = mom.amplitudes();
  detail::for_each_point(grid, Space::momentum, [&](std::size_t, std::size_t flat, std::span<const double> p) {
    amps[flat] *= std::polar(1.0, factor * model.kinetic(p));
  });
}

// to_momentum, kinetic phase, to_position onto `target_q`. With a diagonal
// mass the outgoing K phases, the kinetic phase and the incoming K phases are
// applied as one separable multiply between the two FFTs.
WaveState kinetic_flow(WaveState state, double dt, const Model& model, std::span<const double> target_q) {
  if (!model.diagonal_mass()) {
    WaveState mom = to_momentum(std::move(state));
    apply_kinetic_phase(mom, dt, model);
    return to_position(std::move(mom), target_q);
  }
  const GridSpec& from = state.grid();
  GridSpec to = from.with_q_ctr(target_q);
  const std::size_t d = from.dims();
  const double hbar = from.hbar();
  const auto out_phases = detail::shift_phases(from);
  const auto in_phases = detail::shift_phases(to);
  const auto& set = from.index_set();
  std::vector<std::vector<cplx>> middle(d);
  for (std::size_t l = 0; l < d; ++l) {
    const double inv_m = model.inv_mass()(l, l);
    const auto p = axis_coordinates(from, Space::momentum, l);
    middle[l].resize(p.size());
    for (std::size_t k = 0; k < p.size(); ++k)
      middle[l][k] = out_phases.k_phase[l][k] * std::conj(in_phases.k_phase[l][k]) *
                     std::polar(1.0, -dt / hbar * 0.5 * inv_m * p[k] * p[k]);
  }
  std::vector<std::vector<cplx>> j_in(d);
  for (std::size_t l = 0; l < d; ++l) {
    j_in[l] = in_phases.j_phase[l];
    for (auto& c : j_in[l]) c = std::conj(c);
  }
  const double inv_n = 1.0 / static_cast<double>(from.size());

  auto amps = state.amplitudes();
  detail::multiply_separable(amps, set, out_phases.j_phase, cplx{1.0, 0.0});
  detail::fft_inplace(amps, set.counts(), detail::FftSign::forward);
  detail::multiply_separable(amps, set, middle, out_phases.constant * std::conj(in_phases.constant) * inv_n);
  detail::fft_inplace(amps, set.counts(), detail::FftSign::backward);
  detail::multiply_separable(amps, set, j_in, cplx{1.0, 0.0});
  state.reframe(std::move(to), Representation::position);
  return state;
}

}  // namespace

WaveState step_V_fixed(WaveState state, double dt, const Model& model) {
  require_position(state, "step_V_fixed");
  require_dims(state, model);
  if (dt == 0.0) return state;
  apply_potential_phase(state, dt, model, nullptr);
  return state;
}

WaveState step_T_fixed(WaveState state, double dt, const Model& model) {
  require_position(state, "step_T_fixed");
  require_dims(state, model);
  const std::vector<double> q = state.grid().q_ctr();
  return kinetic_flow(std::move(state), dt, model, q);
}

WaveState step_V_adaptive(WaveState state, double dt, const Model& model) {
  require_position(state, "step_V_adaptive");
  require_dims(state, model);
  if (!model.has_gradient()) throw UnsupportedModel("adaptive propagation needs an analytic gradient");
  std::vector<double> g;
  apply_potential_phase(state, dt, model, &g);
  std::vector<double> p = state.grid().p_ctr();
  for (std::size_t l = 0; l < p.size(); ++l) p[l] -= dt * g[l];
  state.reframe(state.grid().with_p_ctr(p), Representation::position);
  return state;
}

WaveState step_T_adaptive(WaveState state, double dt, const Model& model) {
  require_position(state, "step_T_adaptive");
  require_dims(state, model);
  const std::vector<double> velocity = model.inv_mass() * std::span<const double>(state.grid().p_ctr());
  std::vector<double> q = state.grid().q_ctr();
  for (std::size_t l = 0; l < q.size(); ++l) q[l] += dt * velocity[l];
  return kinetic_flow(std::move(state), dt, model, q);
}

WaveState strang_step(WaveState state, double dt, const Model& model, StepMode mode) {
  const bool adaptive = mode.grid == GridMode::reversible_adaptive;
  auto V = adaptive ? step_V_adaptive : step_V_fixed;
  auto T = adaptive ? step_T_adaptive : step_T_fixed;
  if (mode.flavor == Flavor::tvt) {
    state = T(std::move(state), 0.5 * dt, model);
    state = V(std::move(state), dt, model);
    return T(std::move(state), 0.5 * dt, model);
  }
  state = V(std::move(state), 0.5 * dt, model);
  state = T(std::move(state), dt, model);
  return V(std::move(state), 0.5 * dt, model);
}

WaveState naive_step(WaveState state, double dt, const Model& model, const CompositionScheme& inner, Flavor flavor) {
  require_position(state, "naive_step");
  const StepMode frozen{GridMode::fixed, flavor};
  for (double gamma : inner.coefficients) state = strang_step(std::move(state), gamma * dt, model, frozen);
  const std::vector<double> q_new = expect_position(state);
  const std::vector<double> p_new = expect_momentum(state);
  WaveState mom = to_momentum(std::move(state), p_new);
  return to_position(std::move(mom), q_new);
}

WaveState composed_step(WaveState state, double dt, const Model& model, StepMode mode,
                        const CompositionScheme& scheme) {
  if (mode.grid == GridMode::naive_adaptive) return naive_step(std::move(state), dt, model, scheme, mode.flavor);
  for (double gamma : scheme.coefficients) state = strang_step(std::move(state), gamma * dt, model, mode);
  return state;
}

namespace {

void record_sample(DiagnosticSeries& series, double t, const WaveState& state, const Model& model,
                   const PropagateOptions& options) {
  const GridSpec& grid = state.grid();
  series.times.push_back(t);
  series.norm.push_back(norm(state));
  series.energy.push_back(options.record_energy ? expect_energy(state, model) : std::nan(""));
  series.q_ctr.push_back(grid.q_ctr());
  series.p_ctr.push_back(grid.p_ctr());
  series.expect_q.push_back(expect_position(state));
  series.expect_p.push_back(expect_momentum(state));
  if (options.overlap_reference) {
    const WaveState& ref = *options.overlap_reference;
    if (ref.grid() == grid)
      series.overlap.push_back(inner_product(ref, state));
    else
      series.overlap.push_back(inner_product(ref, resample(state, ref.grid(), ExtrapolationPolicy::silent)));
  }
}

void check_stability(const Model& model, StepMode mode, const CompositionScheme& scheme, double dt) {
  if (mode.grid != GridMode::reversible_adaptive) return;
  if (!model.hessian_at_minimum() && !model.minimum()) return;
  double threshold = 0.0;
  try {
    threshold = verlet_threshold(model);
  } catch (const UnsupportedModel&) {
    return;
  }
  double largest = 0.0;
  for (double g : scheme.coefficients) largest = std::max(largest, std::abs(g));
  if (largest * std::abs(dt) >= threshold) {
    std::ostringstream msg;
    msg << "substep |gamma| dt = " << largest * std::abs(dt) << " reaches the grid-center stability threshold "
        << threshold << "; centers may diverge";
    warn(msg.str());
  }
}

}  // namespace

PropagationReport propagate(WaveState state, const Model& model, StepMode mode, const CompositionScheme& scheme,
                            double dt, std::size_t n_steps, std::size_t sample_every,
                            const PropagateOptions& options) {
  require_position(state, "propagate");
  require_dims(state, model);
  if (n_steps == 0) throw InvalidArgument("n_steps must be at least 1");
  if (sample_every == 0) throw InvalidArgument("sample_every must be at least 1");
  if (!std::isfinite(dt)) throw InvalidArgument("time step must be finite");
  if (options.stability_warning) check_stability(model, mode, scheme, dt);

  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t fft0 = detail::fft_counter(), pot0 = detail::potential_counter();
  PropagationReport report;
  report.series.dims = state.grid().dims();
  auto finish = [&](PropagationReport& r) {
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.fft_count = detail::fft_counter() - fft0;
    r.potential_evaluations = detail::potential_counter() - pot0;
  };

  record_sample(report.series, 0.0, state, model, options);
  for (std::size_t step = 1; step <= n_steps; ++step) {
    WaveState last_good = state;
    try {
      state = composed_step(std::move(state), dt, model, mode, scheme);
    } catch (const ModelDomainError& e) {
      report.final_state = std::move(last_good);
      finish(report);
      throw PropagationFailure("step " + std::to_string(step) + ": " + e.what(), std::move(report));
    }
    if (!all_finite(state)) {
      report.final_state = std::move(last_good);
      finish(report);
      throw PropagationFailure("non-finite amplitudes at step " + std::to_string(step), std::move(report));
    }
    report.steps_completed = step;
    if (step % sample_every == 0) {
      record_sample(report.series, static_cast<double>(step) * dt, state, model, options);
      if (options.observer) options.observer(step, state);
    }
  }
  report.final_state = std::move(state);
  finish(report);
  return report;
}

}  // namespace movgrid
