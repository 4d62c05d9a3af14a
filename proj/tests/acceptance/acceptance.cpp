// Acceptance runs. Each criterion prints one PASS/FAIL line; `--only N M ...`
// restricts the run to the listed criteria.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../support/models.hpp"
#include "../support/oracles.hpp"
#include "movgrid/composition.hpp"
#include "movgrid/diagnostics.hpp"
#include "movgrid/log.hpp"
#include "movgrid/model.hpp"
#include "movgrid/propagator.hpp"
#include "movgrid/transform.hpp"
#include "movgrid/wavefunction.hpp"

using namespace movgrid;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  // Records one sub-check; the criterion passes only if all of them do.
  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [violated]");
  }
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

struct Options {
  bool full = false;
};

// Paper grid for the harmonic model: 32^3 points, dq = 0.4375.
GridSpec harmonic_grid(std::size_t n = 32, double dq = 0.4375, std::vector<double> q_ctr = {0, 0, 0}) {
  return make_grid(std::vector<std::size_t>(3, n), q_ctr, std::vector<double>(3, dq), std::vector<double>(3, 0.0));
}

GridSpec scattering_grid(std::size_t n2 = 128, double lo2 = 0.0, double hi2 = 48.0) {
  return make_grid_from_ranges(std::vector<std::size_t>{128, n2}, std::vector<double>{-14.0, lo2},
                       std::vector<double>{14.0, hi2}, std::vector<double>{0.0, -3.56});
}

double max_norm_drift(const PropagationReport& r) {
  double m = 0.0;
  for (double n : r.series.norm) m = std::max(m, std::abs(n - r.series.norm.front()));
  return m;
}

// ---------------------------------------------------------------------------

Outcome transform_oracle(const Options&) {
  std::mt19937_64 rng(0x61633031);
  std::uniform_real_distribution<double> ctr(-3.0, 3.0), sp(0.2, 0.9);
  double worst = 0.0;
  for (std::size_t d : {1, 2})
    for (std::size_t n : {4, 8})
      for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> qc(d), pc(d), dq(d);
        for (std::size_t l = 0; l < d; ++l) qc[l] = ctr(rng), pc[l] = ctr(rng), dq[l] = sp(rng);
        const GridSpec g = make_grid(std::vector<std::size_t>(d, n), qc, dq, pc);
        const auto psi = oracle::random_amplitudes(g.size(), rng);
        const std::vector<cplx> v(psi.begin(), psi.end());
        const WaveState fwd = to_momentum(WaveState(g, Representation::position, psi));
        worst = std::max(worst, oracle::max_abs_diff(fwd.amplitudes(), oracle::direct_to_momentum(g, v)));
        const WaveState back = to_position(WaveState(g, Representation::momentum, psi));
        worst = std::max(worst, oracle::max_abs_diff(back.amplitudes(), oracle::direct_to_position(g, v)));
      }
  Outcome o;
  o.require(worst <= 1e-13, "max |fast - direct| = " + num(worst) + " <= 1e-13");
  return o;
}

Outcome unitarity(const Options&) {
  std::mt19937_64 rng(0x61633032);
  std::uniform_real_distribution<double> ctr(-5.0, 5.0), sp(0.1, 1.0);
  std::uniform_int_distribution<int> dims(1, 3), pow2(1, 4);
  double norm_err = 0.0, recon_err = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t d = static_cast<std::size_t>(dims(rng));
    std::vector<std::size_t> counts(d);
    std::vector<double> qc(d), pc(d), dq(d);
    for (std::size_t l = 0; l < d; ++l) {
      counts[l] = std::size_t{1} << pow2(rng);
      qc[l] = ctr(rng), pc[l] = ctr(rng), dq[l] = sp(rng);
    }
    const GridSpec g = make_grid(counts, qc, dq, pc);
    auto a = oracle::random_amplitudes(g.size(), rng);
    double n2 = 0.0;
    for (const auto& c : a) n2 += std::norm(c);
    for (auto& c : a) c /= std::sqrt(n2);
    const WaveState psi(g, Representation::position, a);
    const WaveState mom = to_momentum(psi);
    double m2 = 0.0;
    for (const auto& c : mom.amplitudes()) m2 += std::norm(c);
    norm_err = std::max(norm_err, std::abs(std::sqrt(m2) - 1.0));
    recon_err = std::max(recon_err, oracle::max_abs_diff(to_position(mom).amplitudes(), psi.amplitudes()));
  }
  Outcome o;
  o.require(norm_err <= 1e-12, "norm error " + num(norm_err) + " <= 1e-12");
  o.require(recon_err <= 1e-12, "reconstruction error " + num(recon_err) + " <= 1e-12");
  return o;
}

Outcome paper_overlaps(const Options&) {
  Outcome o;
  const GridSpec hg = harmonic_grid();
  const WaveState psi0 = initial_state_for("harmonic", hg);
  const std::vector<double> shift{-1.0, 1.0, 1.0}, zero(3, 0.0), ones(3, 1.0);
  const cplx h = inner_product(psi0, gaussian_state(hg, shift, zero, ones));
  o.require(std::abs(h.real() - 0.472) <= 0.001 && std::abs(h.imag()) <= 0.001,
            "harmonic <psi0|phi0> = " + num(h.real()) + (h.imag() < 0 ? "" : "+") + num(h.imag()) +
                "i, 0.472 +- 0.001");

  const GridSpec sg = scattering_grid();
  const WaveState s0 = initial_state_for("scattering", sg);
  const cplx s = inner_product(s0, gaussian_state(sg, std::vector<double>{0.0, 24.0}, std::vector<double>{0.0, -3.0},
                                                  std::vector<double>{1.0, std::sqrt(8.0)}));
  o.require(std::abs(std::abs(s) - 0.534) <= 0.001, "scattering |<psi0|phi0>| = " + num(std::abs(s)) + ", 0.534 +- 0.001");
  return o;
}

Outcome norm_preservation(const Options&) {
  struct Case {
    std::string label;
    Model model;
    WaveState psi0;
    CompositionScheme scheme;
    Flavor flavor;
    double dt;
  };
  const GridSpec hh = make_grid_from_ranges(std::vector<std::size_t>(4, 8), std::vector<double>(4, -3.0),
                                    std::vector<double>(4, 7.0), std::vector<double>(4, 0.0));
  std::vector<Case> cases;
  cases.push_back({"harmonic", harmonic_excited(HarmonicParams::table_one()),
                   initial_state_for("harmonic", harmonic_grid()), compose_scheme("optimal", 10), Flavor::tvt,
                   50.0 / 512});
  cases.push_back({"scattering", secrest_johnson(), initial_state_for("scattering", scattering_grid()),
                   compose_scheme("optimal", 10), Flavor::vtv, 0.1});
  cases.push_back({"henon_heiles", henon_heiles(4), initial_state_for("henon_heiles", hh), compose_scheme("suzuki", 4),
                   Flavor::tvt, 0.05});
  Outcome o;
  PropagateOptions opts;
  opts.record_energy = false;
  for (const auto& c : cases)
    for (GridMode m : {GridMode::fixed, GridMode::naive_adaptive, GridMode::reversible_adaptive}) {
      const auto r = propagate(c.psi0, c.model, {m, c.flavor}, c.scheme, c.dt, 512, 64, opts);
      const double drift = max_norm_drift(r);
      const char* name = m == GridMode::fixed ? "fixed" : m == GridMode::naive_adaptive ? "naive" : "reversible";
      o.require(drift <= 1e-11, c.label + "/" + name + " " + num(drift));
    }
  o.detail = "norm drift over 512 steps (<= 1e-11): " + o.detail;
  return o;
}

Outcome convergence_orders(const Options& opt) {
  const double t_f = opt.full ? 50.0 : 10.0;
  const Model model = harmonic_excited(HarmonicParams::table_one());
  const WaveState psi0 = initial_state_for("harmonic", harmonic_grid());
  struct Study {
    const char* name;
    int order;
    double dt_max;
  };
  // dt ranges chosen so that the four fitted rows (three doublings) lie in
  // the asymptotic regime and above the roundoff floor.
  const Study studies[] = {{"strang", 2, 0.0390625}, {"suzuki", 4, 0.3125}, {"optimal", 6, 0.3125},
                           {"optimal", 8, 0.3125},   {"optimal", 10, 1.25}};
  Outcome o;
  double floor = 0.0;
  for (const auto& st : studies) {
    // Order 10 gets one extra halving whose row sits on the roundoff floor.
    const std::size_t halvings = st.order == 10 ? 5 : 4;
    auto table = convergence_study(psi0, model, {GridMode::reversible_adaptive, Flavor::tvt},
                                   compose_scheme(st.name, st.order), st.dt_max, halvings, t_f);
    if (st.order == 10) {
      floor = table.errors.back();
      table.dts.pop_back();
      table.errors.pop_back();
      fit_order(table);
    }
    o.require(std::abs(table.fitted_order - st.order) <= 0.3,
              "order " + std::to_string(st.order) + " fitted " + num(table.fitted_order));
  }
  // Accumulated roundoff grows with the number of steps, so the shorter
  // horizon sits lower than the long-run level of about 1e-10.
  const double lo = opt.full ? 1e-11 : 1e-13;
  o.require(floor >= lo && floor <= 1e-9, "floor " + num(floor) + " in [" + num(lo) + ", 1e-9]");
  o.detail = "t_f = " + num(t_f) + ": " + o.detail;
  return o;
}

// Criteria 5 and 7 share the forward run of the reversible propagation.
struct ReversibilityRuns {
  double naive = 0.0, reversible = 0.0;
  std::vector<double> naive_small_dt;
  double max_q_gap = 0.0, max_p_gap = 0.0;
  std::size_t samples = 0;
};

const ReversibilityRuns& reversibility_runs() {
  static const ReversibilityRuns runs = [] {
    ReversibilityRuns r;
    const Model model = harmonic_excited(HarmonicParams::table_one());
    const WaveState psi0 = initial_state_for("harmonic", harmonic_grid());
    const auto scheme = compose_scheme("optimal", 10);
    const double dt = 50.0 / 512;
    auto watch = [&](std::size_t, const WaveState& s) {
      const auto q = expect_position(s), p = expect_momentum(s);
      for (std::size_t l = 0; l < 3; ++l) {
        r.max_q_gap = std::max(r.max_q_gap, std::abs(s.grid().q_ctr()[l] - q[l]));
        r.max_p_gap = std::max(r.max_p_gap, std::abs(s.grid().p_ctr()[l] - p[l]));
      }
      ++r.samples;
    };
    r.reversible =
        reversibility_error(psi0, model, {GridMode::reversible_adaptive, Flavor::tvt}, scheme, dt, 512, watch, 8)
            .distance;
    r.naive = reversibility_error(psi0, model, {GridMode::naive_adaptive, Flavor::tvt}, scheme, dt, 512).distance;
    // Short horizon with a second-order inner step keeps the small-dt sweep cheap.
    for (double small : {1e-2, 5e-3, 2.5e-3})
      r.naive_small_dt.push_back(reversibility_error(psi0, model, {GridMode::naive_adaptive, Flavor::tvt},
                                                     compose_scheme("strang", 2), small,
                                                     static_cast<std::size_t>(std::llround(1.0 / small)))
                                     .distance);
    return r;
  }();
  return runs;
}

Outcome time_reversibility(const Options&) {
  const auto& r = reversibility_runs();
  Outcome o;
  o.require(r.reversible <= 1e-9, "reversible distance " + num(r.reversible) + " <= 1e-9");
  o.require(r.naive >= 1e3 * r.reversible, "naive distance " + num(r.naive) + " >= 1e3 x reversible");
  const auto& s = r.naive_small_dt;
  o.require(s[0] > s[1] && s[1] > s[2] && s[2] <= 1e-10,
            "naive at dt 1e-2, 5e-3, 2.5e-3 (t = 1): " + num(s[0]) + ", " + num(s[1]) + ", " + num(s[2]) +
                " decreasing to <= 1e-10");
  return o;
}

Outcome centers_track_expectations(const Options&) {
  const auto& r = reversibility_runs();
  Outcome o;
  o.require(r.samples == 64, std::to_string(r.samples) + " samples");
  o.require(r.max_q_gap <= 1e-8, "max |q_ctr - <q>| = " + num(r.max_q_gap) + " <= 1e-8");
  o.require(r.max_p_gap <= 1e-8, "max |p_ctr - <p>| = " + num(r.max_p_gap) + " <= 1e-8");
  return o;
}

Outcome adaptive_vs_fixed(const Options&) {
  const Model model = harmonic_excited(HarmonicParams::table_one());
  const auto& q0 = HarmonicParams::table_one().q0;
  // Twice the q- and p-ranges (half the spacing), centered on the oscillation.
  const GridSpec fixed_grid = harmonic_grid(128, 0.21875, q0);
  const auto scheme = compose_scheme("suzuki", 4);
  const double dt = 50.0 / 512;
  PropagateOptions opts;
  opts.record_energy = false;
  const auto adaptive = propagate(initial_state_for("harmonic", harmonic_grid()), model,
                                  {GridMode::reversible_adaptive, Flavor::tvt}, scheme, dt, 512, 8, opts);
  const auto fixed = propagate(initial_state_for("harmonic", fixed_grid), model, {GridMode::fixed, Flavor::tvt},
                               scheme, dt, 512, 8, opts);
  double q_gap = 0.0;
  for (std::size_t k = 0; k < adaptive.series.size(); ++k)
    for (std::size_t l = 0; l < 3; ++l)
      q_gap = std::max(q_gap, std::abs(adaptive.series.expect_q[k][l] - fixed.series.expect_q[k][l]));
  const double d = distance(resample(adaptive.final_state, fixed_grid, ExtrapolationPolicy::silent),
                            fixed.final_state);
  Outcome o;
  o.require(d <= 1e-8, "||psi - Psi|| at t_f = " + num(d) + " <= 1e-8");
  o.require(q_gap <= 1e-8, "max |<q> - <q>_fixed| = " + num(q_gap) + " <= 1e-8");
  return o;
}

Outcome scattering_lifetime(const Options&) {
  const Model model = secrest_johnson();
  const auto scheme = compose_scheme("optimal", 10);
  const double dt = 0.1, tolerance = 1e-3, t_max = 30.0;
  const std::size_t sample_every = 2;
  const StepMode adaptive_mode{GridMode::reversible_adaptive, Flavor::vtv}, fixed_mode{GridMode::fixed, Flavor::vtv};
  // Fixed grids are centered at p = 0 so that incoming and reflected momenta both fit.
  auto fixed_box = [](std::size_t n2, double lo, double hi) {
    return make_grid_from_ranges(std::vector<std::size_t>{128, n2}, std::vector<double>{-14.0, lo},
                                 std::vector<double>{14.0, hi}, std::vector<double>{0.0, 0.0});
  };
  WaveState adaptive = initial_state_for("scattering", scattering_grid());
  WaveState fixed = initial_state_for("scattering", fixed_box(128, 0.0, 48.0));
  WaveState reference = initial_state_for("scattering", fixed_box(1024, -50.0, 175.0));

  auto gap = [&](const WaveState& s) {
    return distance(resample(s, reference.grid(), ExtrapolationPolicy::silent), reference);
  };
  double t_adaptive = 0.0, t_fixed = 0.0, edge = 0.0;
  const auto n_max = static_cast<std::size_t>(std::llround(t_max / dt));
  for (std::size_t k = 1; k <= n_max && t_adaptive == 0.0; ++k) {
    reference = composed_step(std::move(reference), dt, model, fixed_mode, scheme);
    adaptive = composed_step(std::move(adaptive), dt, model, adaptive_mode, scheme);
    if (t_fixed == 0.0) fixed = composed_step(std::move(fixed), dt, model, fixed_mode, scheme);
    if (k % sample_every) continue;
    const double t = static_cast<double>(k) * dt;
    if (t_fixed == 0.0 && gap(fixed) > tolerance) t_fixed = t;
    if (gap(adaptive) > tolerance) t_adaptive = t;
  }
  // The reference is trusted only while its far edge stays empty.
  const auto& g = reference.grid();
  const std::size_t n2 = g.counts()[1], tail = n2 / 16;
  for (std::size_t i = 0; i < g.counts()[0]; ++i)
    for (std::size_t j = n2 - tail; j < n2; ++j) edge += std::norm(reference.amplitudes()[i * n2 + j]);

  Outcome o;
  const bool adaptive_survived = t_adaptive == 0.0;
  if (adaptive_survived) t_adaptive = t_max;
  o.require(t_fixed > 0.0, "fixed grid exceeds " + num(tolerance) + " at t = " + num(t_fixed));
  o.require(t_fixed > 0.0 && t_adaptive >= 4.0 * t_fixed,
            std::string("adaptive grid ") + (adaptive_survived ? "stays below it up to t = " : "exceeds it at t = ") +
                num(t_adaptive) + " (ratio " + num(t_adaptive / t_fixed) + " >= 4)");
  o.require(edge <= 1e-10, "reference edge weight " + num(edge) + " <= 1e-10");
  return o;
}

Outcome grid_convergence(const Options&) {
  const Model model = harmonic_excited(HarmonicParams::table_one());
  const auto& q0 = HarmonicParams::table_one().q0;
  const auto scheme = compose_scheme("strang", 2);
  const double dt = 0.1;
  const std::size_t n = 50;
  // q- and p-ranges both grow by sqrt(2) per doubling of M.
  auto scaled = [](std::size_t m, const std::vector<double>& center) {
    return harmonic_grid(m, 0.4375 * std::sqrt(32.0 / static_cast<double>(m)), center);
  };
  PropagateOptions opts;
  opts.record_energy = false;
  auto run = [&](const GridSpec& g, GridMode mode) {
    return propagate(initial_state_for("harmonic", g), model, {mode, Flavor::tvt}, scheme, dt, n, n, opts)
        .final_state;
  };
  const std::vector<double> origin(3, 0.0);
  const WaveState reference = run(scaled(256, origin), GridMode::reversible_adaptive);
  std::vector<double> adaptive, fixed;
  const std::vector<std::size_t> counts{8, 16, 32, 64, 128};
  for (std::size_t m : counts) {
    adaptive.push_back(
        distance(resample(run(scaled(m, origin), GridMode::reversible_adaptive), reference.grid(),
                          ExtrapolationPolicy::silent),
                 reference));
    fixed.push_back(distance(
        resample(run(scaled(m, q0), GridMode::fixed), reference.grid(), ExtrapolationPolicy::silent), reference));
  }
  // Exponential decay: never increasing, at least 100x per doubling between
  // 1e-1 and the 1e-11 floor, and reaching 1e-9 within the scan.
  auto decays = [](const std::vector<double>& e) {
    bool ok = e.back() <= 1e-9;
    for (std::size_t k = 0; k + 1 < e.size(); ++k) {
      ok = ok && e[k + 1] <= e[k];
      if (e[k] <= 1e-1 && e[k] > 1e-11) ok = ok && e[k + 1] <= std::max(e[k] / 100, 1e-11);
    }
    return ok;
  };
  auto list = [](const std::vector<double>& e) {
    std::string out;
    for (double x : e) out += (out.empty() ? "" : " ") + num(x);
    return out;
  };
  Outcome o;
  o.require(decays(adaptive), "adaptive errors (M = 8..128): " + list(adaptive));
  o.require(decays(fixed), "fixed errors: " + list(fixed));
  bool below = true;
  for (std::size_t k = 0; k < counts.size(); ++k) below = below && adaptive[k] < fixed[k];
  o.require(below, "adaptive < fixed at every M");
  return o;
}

Outcome henon_heiles_autocorrelation(const Options&) {
  const Model model = henon_heiles(4);
  const auto scheme = compose_scheme("suzuki", 4);
  const double dt = 0.05;
  const std::size_t compare_steps = 600, total_steps = 1200, every = 2;
  auto box = [](std::size_t m, double lo, double hi, double p) {
    return make_grid_from_ranges(std::vector<std::size_t>(4, m), std::vector<double>(4, lo),
                                 std::vector<double>(4, hi), std::vector<double>(4, p));
  };
  auto autocorrelation_of = [&](const GridSpec& g, GridMode mode, std::size_t steps) {
    const WaveState psi0 = initial_state_for("henon_heiles", g);
    PropagateOptions opts;
    opts.record_energy = false;
    opts.overlap_reference = &psi0;
    auto r = propagate(psi0, model, {mode, Flavor::tvt}, scheme, dt, steps, every, opts);
    return r.series.overlap;
  };
  const auto reference = autocorrelation_of(box(32, -8.0, 8.0, 0.0), GridMode::fixed, compare_steps);
  const auto adaptive = autocorrelation_of(box(8, -3.0, 7.0, 0.0), GridMode::reversible_adaptive, total_steps);
  const auto coarse = autocorrelation_of(box(8, -3.5, 3.5, 0.0), GridMode::fixed, compare_steps);
  double dev_adaptive = 0.0, dev_coarse = 0.0;
  for (std::size_t k = 0; k < reference.size(); ++k) {
    dev_adaptive = std::max(dev_adaptive, std::abs(adaptive[k] - reference[k]));
    dev_coarse = std::max(dev_coarse, std::abs(coarse[k] - reference[k]));
  }
  Outcome o;
  o.require(adaptive.size() == total_steps / every + 1, "adaptive run completed to t = 60");
  o.require(dev_adaptive <= 0.05, "adaptive 8^4 max |C - C_ref| over [0, 30] = " + num(dev_adaptive) + " <= 0.05");
  o.require(dev_coarse > dev_adaptive, "fixed 8^4 deviation " + num(dev_coarse) + " is larger");
  return o;
}

Outcome efficiency_ordering(const Options&) {
  const Model model = harmonic_excited(HarmonicParams::table_one());
  const WaveState psi0 = initial_state_for("harmonic", harmonic_grid());
  const double t_f = 10.0, target = 1e-9;
  struct Probe {
    const char* name;
    int order;
    double dt;
  };
  // One step size per scheme inside its asymptotic range.
  const Probe probes[] = {{"strang", 2, 0.009765625}, {"suzuki", 4, 0.0390625}, {"optimal", 10, 0.3125}};
  PropagateOptions opts;
  opts.record_energy = false;
  opts.stability_warning = false;
  std::vector<double> cost;
  std::string detail;
  for (const auto& p : probes) {
    const auto scheme = compose_scheme(p.name, p.order);
    const StepMode mode{GridMode::reversible_adaptive, Flavor::tvt};
    const auto n = static_cast<std::size_t>(std::llround(t_f / p.dt));
    const auto coarse = propagate(psi0, model, mode, scheme, p.dt, n, n, opts);
    const auto fine = propagate(psi0, model, mode, scheme, p.dt / 2, 2 * n, 2 * n, opts);
    const double err = distance(resample(coarse.final_state, fine.final_state.grid(), ExtrapolationPolicy::silent),
                                fine.final_state);
    // err ~ C dt^m: wall time scales with the number of steps to reach the target.
    const double dt_target = p.dt * std::pow(target / err, 1.0 / p.order);
    cost.push_back(coarse.wall_seconds * p.dt / dt_target);
    detail += std::string(detail.empty() ? "" : ", ") + "order " + std::to_string(p.order) + " " + num(cost.back()) +
              " s";
  }
  Outcome o;
  o.require(cost[2] < cost[1] && cost[1] < cost[0], "wall time to reach 1e-9 at t_f = 10: " + detail);
  return o;
}

Outcome stability_boundary(const Options&) {
  const Model osc = testmodels::oscillator(1.0);
  const GridSpec g = make_grid(std::vector<std::size_t>{64}, std::vector<double>{0.0},
                               std::vector<double>{std::sqrt(2 * std::numbers::pi / 64)}, std::vector<double>{0.0});
  const WaveState psi0 = gaussian_state(g, std::vector<double>{1.0}, std::vector<double>{0.0}, std::vector<double>{1.0});
  const auto strang = compose_scheme("strang", 2);
  const double threshold = verlet_threshold(osc);

  // Largest center magnitude reached, or +inf once the run breaks down.
  auto excursion = [&](double dt) {
    double peak = 0.0;
    PropagateOptions opts;
    opts.record_energy = false;
    opts.stability_warning = false;
    opts.observer = [&](std::size_t, const WaveState& s) {
      for (std::size_t l = 0; l < s.grid().dims(); ++l)
        peak = std::max({peak, std::abs(s.grid().q_ctr()[l]), std::abs(s.grid().p_ctr()[l])});
    };
    try {
      propagate(psi0, osc, {GridMode::reversible_adaptive, Flavor::tvt}, strang, dt, 1000, 1, opts);
    } catch (const NumericalFailure&) {
      return std::numeric_limits<double>::infinity();
    }
    return peak;
  };
  const double below = excursion(1.9), above = excursion(2.1);
  Outcome o;
  o.require(std::abs(threshold - 2.0) <= 1e-12, "Verlet threshold " + num(threshold));
  o.require(below <= 1e6, "dt = 1.9 peak center " + num(below) + " <= 1e6");
  o.require(above > 1e6, "dt = 2.1 peak center " + num(above) + " > 1e6");
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome(const Options&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance runs"};
  std::vector<int> only;
  Options options;
  app.add_option("--only", only, "criteria to run (default: all)");
  app.add_flag("--full", options.full, "use the long convergence horizon (t_f = 50)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "transform oracle equivalence", 1.0, transform_oracle},
      {2, "unitarity and involution", 10.0, unitarity},
      {3, "initial-state overlaps", 5.0, paper_overlaps},
      {4, "convergence orders", options.full ? 900.0 : 120.0, convergence_orders},
      {5, "time reversibility", 120.0, time_reversibility},
      {6, "norm preservation", 300.0, norm_preservation},
      {7, "centers follow expectations", 120.0, centers_track_expectations},
      {8, "stability boundary", 30.0, stability_boundary},
      {9, "adaptive grid matches the fixed benchmark", 600.0, adaptive_vs_fixed},
      {10, "scattering lifetime extension", 900.0, scattering_lifetime},
      {11, "grid convergence", 600.0, grid_convergence},
      {12, "Henon-Heiles autocorrelation", 600.0, henon_heiles_autocorrelation},
      {13, "efficiency ordering", 300.0, efficiency_ordering},
  };

  // Truncation warnings from coarse grids are expected here.
  const auto previous = set_warning_handler([](std::string_view) {});
  int failures = 0;
  bool ran = false;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    ran = true;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(options);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs <= c.budget_seconds, "runtime " + num(secs) + " s <= " + num(c.budget_seconds) + " s");
    std::printf("AC%d %s %s: %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  set_warning_handler(previous);
  if (!ran) {
    std::fprintf(stderr, "no matching criterion\n");
    return 2;
  }
  return failures ? 1 : 0;
}
