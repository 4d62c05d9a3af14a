#include "movgrid/cli/experiments.hpp"

#include <fftw3.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <ostream>

#include "movgrid/checkpoint.hpp"
#include "movgrid/diagnostics.hpp"
#include "movgrid/errors.hpp"
#include "movgrid/wavefunction.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace movgrid::cli {
namespace {

using json = nlohmann::ordered_json;

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns) : out_(path) {
    if (!out_) throw InvalidArgument("cannot write " + path.string());
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i] << " (n.u.)";
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
    out_ << '\n';
  }

  void raw(const std::string& line) { out_ << line << '\n'; }

 private:
  std::ofstream out_;
};

std::vector<std::string> indexed(const std::string& name, std::size_t d) {
  std::vector<std::string> out;
  for (std::size_t l = 1; l <= d; ++l) out.push_back(name + "_" + std::to_string(l));
  return out;
}

void append(std::vector<double>& row, const std::vector<double>& v) { row.insert(row.end(), v.begin(), v.end()); }

const char* mode_name(GridMode m) {
  switch (m) {
    case GridMode::fixed:
      return "fixed";
    case GridMode::naive_adaptive:
      return "naive";
    case GridMode::reversible_adaptive:
      return "reversible";
  }
  return "?";
}

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

json grid_json(const GridSpec& g) {
  return {{"counts", g.counts()}, {"q_ctr", g.q_ctr()}, {"dq", g.dq()}, {"p_ctr", g.p_ctr()}, {"dp", g.dp()}};
}

// Provenance shared by every subcommand.
json provenance(const std::string& subcommand, const ExperimentConfig& c) {
  json cfg = json::object();
  for (const auto& [k, v] : c.entries) cfg[k] = v;
  json j;
  j["program"] = "movgrid";
  j["version"] = MOVGRID_VERSION;
  j["subcommand"] = subcommand;
  j["config"] = cfg;
  j["resolved"] = {{"model", c.model_label},
                   {"grid", grid_json(c.grid.make())},
                   {"mode", mode_name(c.mode)},
                   {"flavor", c.flavor == Flavor::tvt ? "tvt" : "vtv"},
                   {"scheme", c.scheme_name},
                   {"order", c.scheme_order},
                   {"dt", c.dt},
                   {"t_f", c.t_f},
                   {"n_steps", c.steps()},
                   {"sample_every", c.sample_every}};
  j["threads"] = thread_count();
  j["fftw"] = std::string(fftw_version);
  j["compiler"] = __VERSION__;
  return j;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

struct ReferenceTracker {
  std::optional<CsvWriter> csv;
  std::optional<WaveState> state;
  const Model* model = nullptr;
  CompositionScheme scheme;
  Flavor flavor = Flavor::tvt;
  double dt = 0.0;

  void record(double t, const WaveState& psi) {
    const WaveState on_ref = psi.grid() == state->grid() ? psi : resample(psi, state->grid(), ExtrapolationPolicy::silent);
    std::vector<double> row{t, distance(on_ref, *state)};
    const auto q = expect_position(psi), q_ref = expect_position(*state);
    for (std::size_t l = 0; l < q.size(); ++l) row.push_back(q[l] - q_ref[l]);
    csv->row(row);
  }

  void advance(std::size_t steps) {
    for (std::size_t k = 0; k < steps; ++k)
      state = composed_step(std::move(*state), dt, *model, {GridMode::fixed, flavor}, scheme);
    if (!all_finite(*state)) throw NumericalFailure("reference run produced non-finite amplitudes");
  }
};

// Propagation shared by run and spectrum. Returns the exit code.
int propagate_and_write(const std::string& subcommand, const ExperimentConfig& c, const RunOptions& o,
                        std::ostream& err, std::vector<cplx>* autocorr_out = nullptr) {
  const Model model = c.make_model();
  const GridSpec grid = c.grid.make();
  const WaveState psi0 = c.make_initial_state(grid);
  const CompositionScheme scheme = c.make_scheme();
  const std::size_t n = c.steps(), s = c.sample_every;
  const std::size_t d = grid.dims();

  ReferenceTracker ref;
  if (c.reference) {
    std::vector<std::string> cols{"t", "distance"};
    for (const auto& name : indexed("delta_expect_q", d)) cols.push_back(name);
    ref.csv.emplace(o.out_dir / "reference.csv", cols);
    ref.state = c.make_initial_state(c.reference->make());
    ref.model = &model;
    ref.scheme = scheme;
    ref.flavor = c.flavor;
    ref.dt = c.dt;
    ref.record(0.0, psi0);
  }

  PropagateOptions po;
  po.overlap_reference = &psi0;
  po.record_energy = c.record_energy;
  if (ref.state)
    po.observer = [&](std::size_t step, const WaveState& psi) {
      ref.advance(s);
      ref.record(static_cast<double>(step) * c.dt, psi);
    };

  PropagationReport report;
  std::string status = "ok", message;
  int code = kOk;
  try {
    report = propagate(psi0, model, c.step_mode(), scheme, c.dt, n, s, po);
  } catch (const PropagationFailure& e) {
    report = e.partial();
    status = "numerical_failure";
    message = e.what();
    code = kNumericalFailure;
    err << "movgrid: numerical failure: " << e.what() << '\n';
  }

  // Sample 0 is the initial state; series.csv holds the n / s samples after it.
  const DiagnosticSeries& series = report.series;
  std::vector<std::string> cols{"t", "norm", "energy"};
  for (const char* name : {"q_ctr", "p_ctr", "expect_q", "expect_p"})
    for (const auto& c_name : indexed(name, d)) cols.push_back(c_name);
  cols.push_back("overlap_re");
  cols.push_back("overlap_im");
  {
    CsvWriter csv(o.out_dir / "series.csv", cols);
    for (std::size_t k = 1; k < series.size(); ++k) {
      std::vector<double> row{series.times[k], series.norm[k], series.energy[k]};
      append(row, series.q_ctr[k]);
      append(row, series.p_ctr[k]);
      append(row, series.expect_q[k]);
      append(row, series.expect_p[k]);
      row.push_back(series.overlap[k].real());
      row.push_back(series.overlap[k].imag());
      csv.row(row);
    }
  }
  if (c.write_autocorrelation || autocorr_out) {
    CsvWriter csv(o.out_dir / "autocorr.csv", {"t", "re", "im"});
    for (std::size_t k = 0; k < series.size(); ++k)
      csv.row({series.times[k], series.overlap[k].real(), series.overlap[k].imag()});
    if (autocorr_out) *autocorr_out = series.overlap;
  }
  write_checkpoint(o.out_dir / "final_state.mgwf", report.final_state);

  json j = provenance(subcommand, c);
  j["status"] = status;
  if (!message.empty()) j["message"] = message;
  j["steps_completed"] = report.steps_completed;
  j["wall_seconds"] = report.wall_seconds;
  j["fft_count"] = report.fft_count;
  j["potential_evaluations"] = report.potential_evaluations;
  write_json(o.out_dir / "run.json", j);
  return code;
}

int run_converge(const ExperimentConfig& c, const RunOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  const Model model = c.make_model();
  const WaveState psi0 = c.make_initial_state(c.grid.make());
  const double ratio = c.t_f / c.converge_dt_max;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
    throw ConfigError("propagation.t_f must be a multiple of converge.dt_max", c.line_of("converge.dt_max"));
  const ConvergenceTable t = convergence_study(psi0, model, c.step_mode(), c.make_scheme(), c.converge_dt_max,
                                               c.converge_halvings, c.t_f);
  {
    CsvWriter csv(o.out_dir / "convergence.csv", {"dt", "error", "used_in_fit"});
    for (std::size_t j = 0; j < t.dts.size(); ++j) csv.row({t.dts[j], t.errors[j], t.used_in_fit[j] ? 1.0 : 0.0});
    csv.raw("# fitted_order," + format_double(t.fitted_order));
    csv.raw("# floor," + format_double(t.floor));
  }
  json j = provenance("converge", c);
  j["status"] = "ok";
  j["fitted_order"] = format_double(t.fitted_order);
  j["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json(o.out_dir / "run.json", j);
  return kOk;
}

std::size_t integer_steps(double t, double dt, const ExperimentConfig& c, const std::string& key) {
  const double r = t / dt;
  if (std::abs(r - std::round(r)) > 1e-9 * r || std::round(r) < 1.0)
    throw ConfigError("t = " + format_double(t) + " is not a multiple of dt = " + format_double(dt), c.line_of(key));
  return static_cast<std::size_t>(std::llround(r));
}

int run_reverse(const ExperimentConfig& c, const RunOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  const Model model = c.make_model();
  const WaveState psi0 = c.make_initial_state(c.grid.make());
  const CompositionScheme scheme = c.make_scheme();
  CsvWriter csv(o.out_dir / "reversibility.csv", {"dt", "t", "naive_distance", "reversible_distance"});
  auto point = [&](double dt, double t, std::size_t n) {
    const double naive = reversibility_error(psi0, model, {GridMode::naive_adaptive, c.flavor}, scheme, dt, n).distance;
    const double rev =
        reversibility_error(psi0, model, {GridMode::reversible_adaptive, c.flavor}, scheme, dt, n).distance;
    csv.row({dt, t, naive, rev});
  };
  if (c.reverse_time_sweep) {
    for (double t : c.reverse_times) point(c.dt, t, integer_steps(t, c.dt, c, "reverse.times"));
  } else {
    for (double dt : c.reverse_dts) point(dt, c.t_f, integer_steps(c.t_f, dt, c, "reverse.dts"));
  }
  json j = provenance("reverse", c);
  j["status"] = "ok";
  j["sweep"] = c.reverse_time_sweep ? "time" : "dt";
  j["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json(o.out_dir / "run.json", j);
  return kOk;
}

// Grid with M points per dimension: spacing scaled by sqrt(M0 / M) so that
// q- and p-ranges both grow by sqrt(2) per doubling.
GridSpec scaled_grid(const GridSpec& base, std::size_t m, std::span<const double> q_ctr) {
  const std::size_t d = base.dims();
  std::vector<std::size_t> counts(d, m);
  std::vector<double> dq(d);
  for (std::size_t l = 0; l < d; ++l)
    dq[l] = base.dq()[l] * std::sqrt(static_cast<double>(base.counts()[l]) / static_cast<double>(m));
  return make_grid(counts, q_ctr, dq, base.p_ctr(), base.hbar());
}

int run_gridscan(const ExperimentConfig& c, const RunOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  if (c.gridscan_counts.empty() || c.gridscan_reference == 0)
    throw ConfigError("gridscan needs gridscan.counts and gridscan.reference_count", c.line_of("gridscan.counts"));
  const Model model = c.make_model();
  const CompositionScheme scheme = c.make_scheme();
  const GridSpec base = c.grid.make();
  const std::vector<double> fixed_center = c.gridscan_fixed_q_ctr.empty() ? base.q_ctr() : c.gridscan_fixed_q_ctr;
  if (fixed_center.size() != base.dims())
    throw ConfigError("gridscan.fixed_q_ctr needs one entry per dimension", c.line_of("gridscan.fixed_q_ctr"));
  for (std::size_t m : c.gridscan_counts)
    if (m > c.gridscan_reference)
      throw ConfigError("gridscan.counts must not exceed gridscan.reference_count", c.line_of("gridscan.counts"));
  const auto points = static_cast<double>(c.gridscan_reference);
  if (!o.large && std::pow(points, static_cast<double>(base.dims())) > static_cast<double>(kLargeGridPoints))
    throw ConfigError("gridscan reference grid has more than " + std::to_string(kLargeGridPoints) +
                          " points; rerun with --large",
                      c.line_of("gridscan.reference_count"));
  const std::size_t n = c.steps();
  PropagateOptions quiet;
  quiet.record_energy = false;
  auto final_state = [&](const GridSpec& g, GridMode mode) {
    return propagate(c.make_initial_state(g), model, {mode, c.flavor}, scheme, c.dt, n, n, quiet).final_state;
  };

  // The largest adaptive run is the common reference for both columns.
  const WaveState reference = final_state(scaled_grid(base, c.gridscan_reference, base.q_ctr()), GridMode::reversible_adaptive);
  auto error = [&](const WaveState& psi) {
    return distance(resample(psi, reference.grid(), ExtrapolationPolicy::silent), reference);
  };
  CsvWriter csv(o.out_dir / "gridscan.csv", {"points_per_dim", "adaptive_error", "fixed_error"});
  for (std::size_t m : c.gridscan_counts) {
    const double adaptive = error(final_state(scaled_grid(base, m, base.q_ctr()), GridMode::reversible_adaptive));
    const double fixed = error(final_state(scaled_grid(base, m, fixed_center), GridMode::fixed));
    csv.row({static_cast<double>(m), adaptive, fixed});
  }
  json j = provenance("gridscan", c);
  j["status"] = "ok";
  j["reference_count"] = c.gridscan_reference;
  j["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json(o.out_dir / "run.json", j);
  return kOk;
}

int run_spectrum(const ExperimentConfig& c, const RunOptions& o, std::ostream& err) {
  std::vector<cplx> autocorr;
  const int code = propagate_and_write("spectrum", c, o, err, &autocorr);
  if (code != kOk) return code;
  const auto points = spectrum(autocorr, c.dt * static_cast<double>(c.sample_every), c.spectrum_t_damp,
                               c.spectrum_e_min, c.spectrum_e_max);
  CsvWriter csv(o.out_dir / "spectrum.csv", {"energy", "intensity"});
  for (const auto& p : points) csv.row({p.energy, p.intensity});
  return kOk;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

int execute(const std::string& subcommand, const ExperimentConfig& config, const RunOptions& options,
            std::ostream& err) {
  try {
#ifdef _OPENMP
    if (options.threads > 0) omp_set_num_threads(options.threads);
#endif
    validate(config, options.large);
    std::filesystem::create_directories(options.out_dir);
    if (subcommand == "run") return propagate_and_write("run", config, options, err);
    if (subcommand == "converge") return run_converge(config, options);
    if (subcommand == "reverse") return run_reverse(config, options);
    if (subcommand == "gridscan") return run_gridscan(config, options);
    if (subcommand == "spectrum") return run_spectrum(config, options, err);
    err << "movgrid: unknown subcommand '" << subcommand << "'\n";
    return kConfigError;
  } catch (const NumericalFailure& e) {
    err << "movgrid: numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const DegenerateState& e) {
    err << "movgrid: numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const ConfigError& e) {
    err << "movgrid: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "movgrid: " << e.what() << '\n';
    return kConfigError;
  }
}

int execute(const std::string& subcommand, const std::filesystem::path& config_path, const RunOptions& options,
            std::ostream& err) {
  ExperimentConfig config;
  try {
    config = load_config(config_path);
  } catch (const std::exception& e) {
    err << "movgrid: config error: " << config_path.string() << ": " << e.what() << '\n';
    return kConfigError;
  }
  return execute(subcommand, config, options, err);
}

}  // namespace movgrid::cli
