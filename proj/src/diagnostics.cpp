#include "movgrid/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "movgrid/errors.hpp"
#include "movgrid/wavefunction.hpp"

namespace movgrid {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double frame_distance(const WaveState& a, const WaveState& b, bool* resampled = nullptr) {
  if (a.grid() == b.grid() && a.representation() == b.representation()) return distance(a, b);
  if (resampled) *resampled = true;
  const WaveState bb = b.representation() == Representation::position ? b : resample(b, b.grid());
  return distance(resample(a, b.grid(), ExtrapolationPolicy::silent), bb);
}

}  // namespace

ReversibilityResult reversibility_error(const WaveState& initial, const Model& model, StepMode mode,
                                        const CompositionScheme& scheme, double dt, std::size_t n_steps,
                                        const std::function<void(std::size_t, const WaveState&)>& forward_observer,
                                        std::size_t observe_every) {
  PropagateOptions quiet;
  quiet.record_energy = false;
  quiet.stability_warning = false;
  PropagateOptions watched = quiet;
  watched.observer = forward_observer;
  WaveState fw = forward_observer
                     ? propagate(initial, model, mode, scheme, dt, n_steps, observe_every, watched).final_state
                     : propagate(initial, model, mode, scheme, dt, n_steps, n_steps, quiet).final_state;
  WaveState fb = propagate(std::move(fw), model, mode, scheme, -dt, n_steps, n_steps, quiet).final_state;
  ReversibilityResult r;
  r.distance = frame_distance(fb, initial, &r.resampled);
  return r;
}

void fit_order(ConvergenceTable& table) {
  const std::size_t n = table.errors.size();
  table.used_in_fit.assign(n, false);
  table.fitted_order = kNaN;
  table.floor = kNaN;
  const double min_ratio = std::pow(2.0, table.nominal_order / 2.0);

  // good[j]: the pair of rows (j, j+1) shows asymptotic decrease.
  std::size_t best_start = 0, best_len = 0;
  for (std::size_t j = 0; j + 1 < n;) {
    std::size_t k = j;
    while (k + 1 < n && std::isfinite(table.errors[k]) && std::isfinite(table.errors[k + 1]) &&
           table.errors[k + 1] > 0.0 && table.errors[k] / table.errors[k + 1] >= min_ratio)
      ++k;
    if (k - j > best_len) {
      best_len = k - j;
      best_start = j;
    }
    j = k + 1;
  }
  // best_len ratios span best_len + 1 rows; require three doublings.
  if (best_len >= 3) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const std::size_t m = best_len + 1;
    for (std::size_t j = best_start; j < best_start + m; ++j) {
      table.used_in_fit[j] = true;
      const double x = std::log(table.dts[j]), y = std::log(table.errors[j]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double md = static_cast<double>(m);
    table.fitted_order = (md * sxy - sx * sy) / (md * sxx - sx * sx);
  }

  const std::size_t tail_start = best_len >= 3 ? best_start + best_len + 1 : n;
  double log_sum = 0.0;
  std::size_t count = 0;
  for (std::size_t j = tail_start; j < n; ++j)
    if (std::isfinite(table.errors[j]) && table.errors[j] > 0.0) {
      log_sum += std::log(table.errors[j]);
      ++count;
    }
  if (count > 0) table.floor = std::exp(log_sum / static_cast<double>(count));
}

ConvergenceTable convergence_study(const WaveState& initial, const Model& model, StepMode mode,
                                   const CompositionScheme& scheme, double dt_max, std::size_t n_halvings,
                                   double t_f) {
  if (n_halvings < 3) throw InvalidArgument("convergence study needs at least 3 halvings");
  if (!(dt_max > 0.0) || !(t_f > 0.0)) throw InvalidArgument("dt_max and t_f must be positive");
  const double steps0 = t_f / dt_max;
  const auto n0 = static_cast<std::size_t>(std::llround(steps0));
  if (n0 == 0 || std::abs(steps0 - static_cast<double>(n0)) > 1e-9 * steps0)
    throw InvalidArgument("t_f must be an integer multiple of dt_max");

  PropagateOptions quiet;
  quiet.record_energy = false;
  std::vector<std::optional<WaveState>> finals;
  for (std::size_t j = 0; j <= n_halvings; ++j) {
    const std::size_t steps = n0 << j;
    const double dt = t_f / static_cast<double>(steps);
    try {
      finals.emplace_back(propagate(initial, model, mode, scheme, dt, steps, steps, quiet).final_state);
    } catch (const NumericalFailure&) {
      finals.emplace_back(std::nullopt);
    } catch (const DegenerateState&) {
      finals.emplace_back(std::nullopt);
    }
  }

  ConvergenceTable table;
  table.nominal_order = scheme.order;
  for (std::size_t j = 0; j < n_halvings; ++j) {
    table.dts.push_back(dt_max / std::ldexp(1.0, static_cast<int>(j)));
    if (finals[j] && finals[j + 1])
      table.errors.push_back(frame_distance(*finals[j], *finals[j + 1]));
    else
      table.errors.push_back(kNaN);
  }
  fit_order(table);
  return table;
}

double verlet_threshold(const Model& model) {
  const std::size_t d = model.dims();
  Matrix h;
  if (model.hessian_at_minimum()) {
    h = *model.hessian_at_minimum();
  } else if (model.minimum() && model.has_gradient()) {
    const auto& x0 = *model.minimum();
    h = Matrix(d);
    std::vector<double> x(x0), gp(d), gm(d);
    for (std::size_t j = 0; j < d; ++j) {
      const double step = 1e-4 * std::max(1.0, std::abs(x0[j]));
      x = x0;
      x[j] = x0[j] + step;
      model.gradient(x, gp);
      x[j] = x0[j] - step;
      model.gradient(x, gm);
      for (std::size_t i = 0; i < d; ++i) h(i, j) = (gp[i] - gm[i]) / (2.0 * step);
    }
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) h(i, j) = h(j, i) = 0.5 * (h(i, j) + h(j, i));
  } else {
    throw UnsupportedModel("model '" + model.label() + "' has no quadratic expansion (no minimum)");
  }
  const auto l = cholesky(model.inv_mass());
  if (!l) throw ModelDefinitionError("inverse mass matrix is not positive definite");
  const auto ev = symmetric_eigenvalues(transpose(*l) * h * *l, 1e-15);
  const double omega2 = ev.back();
  if (!(omega2 > 0.0)) throw UnsupportedModel("Hessian at the minimum has no positive curvature");
  return 2.0 / std::sqrt(omega2);
}

std::vector<cplx> autocorrelation(std::span<const WaveState> states, const WaveState& reference) {
  std::vector<cplx> out;
  out.reserve(states.size());
  for (const WaveState& s : states) {
    if (s.grid() == reference.grid() && s.representation() == reference.representation())
      out.push_back(inner_product(reference, s));
    else
      out.push_back(inner_product(reference, resample(s, reference.grid(), ExtrapolationPolicy::silent)));
  }
  return out;
}

std::vector<SpectrumPoint> spectrum(std::span<const cplx> autocorr, double dt_sample, double t_damp, double e_min,
                                    double e_max, double hbar) {
  const std::size_t n = autocorr.size();
  if (n < 2) throw InvalidArgument("spectrum needs at least two autocorrelation samples");
  if (!(dt_sample > 0.0)) throw InvalidArgument("sampling interval must be positive");
  if (e_max < 0.0) e_max = std::numbers::pi * hbar / dt_sample;
  if (!(e_max > e_min)) throw InvalidArgument("energy window must satisfy e_min < e_max");
  const double total = static_cast<double>(n - 1) * dt_sample;
  const double de = 2.0 * std::numbers::pi * hbar / (4.0 * total);

  std::vector<double> weight(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt_sample;
    const double damp = t_damp > 0.0 ? std::exp(-(t / t_damp) * (t / t_damp)) : 1.0;
    weight[k] = ((k == 0 || k == n - 1) ? 0.5 : 1.0) * damp * dt_sample;
  }

  std::vector<SpectrumPoint> out;
  const auto points = static_cast<std::size_t>(std::floor((e_max - e_min) / de)) + 1;
  out.reserve(points);
  for (std::size_t m = 0; m < points; ++m) {
    const double e = e_min + static_cast<double>(m) * de;
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double t = static_cast<double>(k) * dt_sample;
      s += weight[k] * (std::polar(1.0, e * t / hbar) * autocorr[k]).real();
    }
    out.push_back({e, s});
  }
  return out;
}

}  // namespace movgrid
