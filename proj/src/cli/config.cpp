#include "movgrid/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "movgrid/errors.hpp"
#include "movgrid/wavefunction.hpp"

namespace movgrid::cli {
namespace {

struct Entry {
  std::string key;
  std::string value;
  std::size_t line;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> tokens(const std::string& value) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : value) {
    if (c == ' ' || c == '\t' || c == ',') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double parse_plain(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
    throw ConfigError("'" + std::string(tok) + "' is not a finite number", line);
  return v;
}

double parse_number(const std::string& tok, std::size_t line) {
  const auto slash = tok.find('/');
  if (slash == std::string::npos) return parse_plain(tok, line);
  const double num = parse_plain(std::string_view(tok).substr(0, slash), line);
  const double den = parse_plain(std::string_view(tok).substr(slash + 1), line);
  if (den == 0.0) throw ConfigError("division by zero in '" + tok + "'", line);
  return num / den;
}

std::vector<double> numbers(const Entry& e) {
  const auto toks = tokens(e.value);
  if (toks.empty()) throw ConfigError("'" + e.key + "' needs a value", e.line);
  std::vector<double> out;
  for (const auto& t : toks) out.push_back(parse_number(t, e.line));
  return out;
}

double number(const Entry& e) {
  const auto v = numbers(e);
  if (v.size() != 1) throw ConfigError("'" + e.key + "' takes a single number", e.line);
  return v[0];
}

std::vector<std::size_t> counts(const Entry& e) {
  std::vector<std::size_t> out;
  for (double v : numbers(e)) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e12)
      throw ConfigError("'" + e.key + "' needs positive integers", e.line);
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::size_t count(const Entry& e) {
  const auto v = counts(e);
  if (v.size() != 1) throw ConfigError("'" + e.key + "' takes a single integer", e.line);
  return v[0];
}

bool boolean(const Entry& e) {
  const std::string v = trim(e.value);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("'" + e.key + "' must be true or false", e.line);
}

std::string word(const Entry& e) {
  const auto toks = tokens(e.value);
  if (toks.size() != 1) throw ConfigError("'" + e.key + "' takes a single word", e.line);
  return toks[0];
}

std::vector<Entry> split_lines(const std::string& text) {
  std::vector<Entry> out;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    Entry e{trim(body.substr(0, eq)), trim(body.substr(eq + 1)), line};
    if (e.key.empty()) throw ConfigError("missing key before '='", line);
    if (e.value.empty()) throw ConfigError("'" + e.key + "' has no value", line);
    if (!seen.insert(e.key).second) throw ConfigError("duplicate key '" + e.key + "'", line);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<double> repeat(double v, std::size_t n) { return std::vector<double>(n, v); }

void apply_preset(ExperimentConfig& c) {
  if (c.model_label == "harmonic") {
    c.grid.counts = {32, 32, 32};
    c.grid.q_ctr = repeat(0.0, 3);
    c.grid.dq = repeat(0.4375, 3);
    c.grid.p_ctr = repeat(0.0, 3);
    c.state_q0 = repeat(0.0, 3);
    c.state_p0 = repeat(0.0, 3);
    c.state_width = repeat(1.0, 3);
    c.flavor = Flavor::tvt;
    c.scheme_name = "optimal";
    c.scheme_order = 10;
    c.dt = 50.0 / 512.0;
    c.t_f = 50.0;
    c.converge_dt_max = 50.0 / 64.0;
    c.reverse_dts = {50.0 / 64, 50.0 / 128, 50.0 / 256, 50.0 / 512};
    c.reverse_times = {5.0, 10.0, 20.0, 50.0};
    c.gridscan_counts = {8, 16, 32, 64};
    c.gridscan_reference = 128;
    c.gridscan_fixed_q_ctr = c.harmonic.q0;
  } else if (c.model_label == "scattering") {
    c.grid.counts = {128, 128};
    c.grid.q_min = {-14.0, 0.0};
    c.grid.q_max = {14.0, 48.0};
    c.grid.p_ctr = {0.0, -3.56};
    c.state_q0 = {0.0, 24.0};
    c.state_p0 = {0.0, -3.56};
    c.state_width = {1.0, std::sqrt(8.0)};
    c.flavor = Flavor::vtv;
    c.scheme_name = "optimal";
    c.scheme_order = 10;
    c.dt = 0.1;
    c.t_f = 40.0;
    c.converge_dt_max = 0.4;
    c.reverse_dts = {0.4, 0.2, 0.1};
    c.reverse_times = {5.0, 10.0, 20.0};
    c.gridscan_counts = {32, 64};
    c.gridscan_reference = 128;
    c.gridscan_fixed_q_ctr = {0.0, 24.0};
  } else if (c.model_label == "henon_heiles") {
    const std::size_t d = c.hh_dims;
    c.grid.counts.assign(d, 8);
    c.grid.q_min = repeat(-3.0, d);
    c.grid.q_max = repeat(7.0, d);
    c.grid.p_ctr = repeat(0.0, d);
    c.state_q0 = repeat(2.0, d);
    c.state_p0 = repeat(0.0, d);
    c.state_width = repeat(1.0, d);
    c.flavor = Flavor::tvt;
    c.scheme_name = "suzuki";
    c.scheme_order = 4;
    c.dt = 0.05;
    c.t_f = 60.0;
    c.write_autocorrelation = true;
    c.converge_dt_max = 0.2;
    c.reverse_dts = {0.2, 0.1, 0.05};
    c.reverse_times = {5.0, 10.0, 20.0};
    c.gridscan_counts = {8, 16};
    c.gridscan_reference = 32;
    c.gridscan_fixed_q_ctr = repeat(0.0, d);
  } else {
    throw InvalidArgument("unknown model label '" + c.model_label + "' (expected harmonic, scattering or henon_heiles)");
  }
}

GridMode parse_mode(const Entry& e) {
  const std::string w = word(e);
  if (w == "fixed") return GridMode::fixed;
  if (w == "naive" || w == "naive_adaptive") return GridMode::naive_adaptive;
  if (w == "reversible" || w == "reversible_adaptive") return GridMode::reversible_adaptive;
  throw ConfigError("unknown mode '" + w + "' (expected fixed, naive or reversible)", e.line);
}

Flavor parse_flavor(const Entry& e) {
  const std::string w = word(e);
  if (w == "tvt" || w == "TVT") return Flavor::tvt;
  if (w == "vtv" || w == "VTV") return Flavor::vtv;
  throw ConfigError("unknown flavor '" + w + "' (expected tvt or vtv)", e.line);
}

// Tracks which of the two grid forms a config section used.
struct GeometryForm {
  std::size_t box_line = 0, center_line = 0;
};

void set_geometry(GridGeometry& g, GeometryForm& form, const std::string& field, const Entry& e) {
  if (field == "counts") {
    g.counts = counts(e);
  } else if (field == "q_min" || field == "q_max") {
    if (form.center_line) throw ConfigError("give either q_min/q_max or q_ctr/dq, not both", e.line);
    if (!form.box_line) {
      g.q_ctr.clear();
      g.dq.clear();
    }
    form.box_line = e.line;
    (field == "q_min" ? g.q_min : g.q_max) = numbers(e);
  } else if (field == "q_ctr" || field == "dq") {
    if (form.box_line) throw ConfigError("give either q_min/q_max or q_ctr/dq, not both", e.line);
    if (!form.center_line) {
      g.q_min.clear();
      g.q_max.clear();
    }
    form.center_line = e.line;
    (field == "q_ctr" ? g.q_ctr : g.dq) = numbers(e);
  } else if (field == "p_ctr") {
    g.p_ctr = numbers(e);
  } else {
    throw ConfigError("unknown key '" + e.key + "'", e.line);
  }
}

std::vector<double> broadcast(const std::vector<double>& v, std::size_t d, const char* what) {
  if (v.size() == d) return v;
  if (v.size() == 1) return std::vector<double>(d, v[0]);
  throw InvalidArgument(std::string(what) + " has " + std::to_string(v.size()) + " entries for a " +
                        std::to_string(d) + "-D grid");
}

bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

}  // namespace

GridSpec GridGeometry::make() const {
  const std::size_t d = counts.size();
  if (d == 0) throw InvalidArgument("grid counts are missing");
  const auto p = p_ctr.empty() ? std::vector<double>(d, 0.0) : broadcast(p_ctr, d, "p_ctr");
  if (!q_min.empty() || !q_max.empty()) {
    if (q_min.empty() || q_max.empty()) throw InvalidArgument("q_min and q_max must both be given");
    return make_grid_from_ranges(counts, broadcast(q_min, d, "q_min"), broadcast(q_max, d, "q_max"), p);
  }
  if (q_ctr.empty() || dq.empty()) throw InvalidArgument("grid needs q_min/q_max or q_ctr/dq");
  return make_grid(counts, broadcast(q_ctr, d, "q_ctr"), broadcast(dq, d, "dq"), p);
}

std::size_t ExperimentConfig::line_of(const std::string& key) const {
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].first == key) return entry_lines[i];
  return 0;
}

Model ExperimentConfig::make_model() const {
  if (model_label == "harmonic") return harmonic_excited(harmonic);
  if (model_label == "scattering") return secrest_johnson();
  if (model_label == "henon_heiles") return henon_heiles(hh_dims, hh_lambda);
  throw InvalidArgument("unknown model label '" + model_label + "'");
}

WaveState ExperimentConfig::make_initial_state(const GridSpec& g) const {
  if (!state_overridden) return initial_state_for(model_label, g);
  const std::size_t d = g.dims();
  return gaussian_state(g, broadcast(state_q0, d, "state.q0"), broadcast(state_p0, d, "state.p0"),
                        broadcast(state_width, d, "state.width"));
}

std::size_t ExperimentConfig::steps() const { return static_cast<std::size_t>(std::llround(t_f / dt)); }

CompositionScheme ExperimentConfig::make_scheme() const { return compose_scheme(scheme_name, scheme_order); }

ExperimentConfig parse_config(const std::string& text) {
  const auto lines = split_lines(text);
  ExperimentConfig c;
  const Entry* label = nullptr;
  for (const auto& e : lines)
    if (e.key == "model.label") label = &e;
  if (!label) throw ConfigError("missing required key 'model.label'");
  c.model_label = word(*label);
  for (const auto& e : lines)
    if (e.key == "model.dims") {
      if (c.model_label != "henon_heiles") throw ConfigError("'model.dims' applies to henon_heiles only", e.line);
      c.hh_dims = count(e);
      if (c.hh_dims < 2 || c.hh_dims > 16) throw ConfigError("model.dims must be between 2 and 16", e.line);
    }
  try {
    apply_preset(c);
  } catch (const InvalidArgument& err) {
    throw ConfigError(err.what(), label->line);
  }

  GeometryForm grid_form, ref_form;
  for (const auto& e : lines) {
    c.entries.emplace_back(e.key, e.value);
    c.entry_lines.push_back(e.line);
    const auto dot = e.key.find('.');
    const std::string section = dot == std::string::npos ? e.key : e.key.substr(0, dot);
    const std::string field = dot == std::string::npos ? std::string() : e.key.substr(dot + 1);
    auto unknown = [&] { return ConfigError("unknown key '" + e.key + "'", e.line); };

    if (section == "model") {
      if (field == "label" || field == "dims") continue;
      if (field == "lambda") {
        if (c.model_label != "henon_heiles") throw ConfigError("'model.lambda' applies to henon_heiles only", e.line);
        c.hh_lambda = number(e);
      } else if (field == "K" || field == "q0" || field == "omega") {
        if (c.model_label != "harmonic") throw ConfigError("'" + e.key + "' applies to harmonic only", e.line);
        const auto v = numbers(e);
        if (field == "K") {
          const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(v.size()))));
          if (n * n != v.size()) throw ConfigError("model.K needs D*D entries (row-major)", e.line);
          c.harmonic.K = Matrix(n, v);
        } else {
          (field == "q0" ? c.harmonic.q0 : c.harmonic.omegas) = v;
        }
      } else {
        throw unknown();
      }
    } else if (section == "grid") {
      set_geometry(c.grid, grid_form, field, e);
    } else if (section == "reference") {
      if (!c.reference) c.reference.emplace();
      set_geometry(*c.reference, ref_form, field, e);
    } else if (section == "state") {
      c.state_overridden = true;
      if (field == "q0")
        c.state_q0 = numbers(e);
      else if (field == "p0")
        c.state_p0 = numbers(e);
      else if (field == "width")
        c.state_width = numbers(e);
      else
        throw unknown();
    } else if (section == "propagation") {
      if (field == "mode")
        c.mode = parse_mode(e);
      else if (field == "flavor")
        c.flavor = parse_flavor(e);
      else if (field == "dt")
        c.dt = number(e);
      else if (field == "t_f")
        c.t_f = number(e);
      else
        throw unknown();
    } else if (section == "scheme") {
      if (field == "name")
        c.scheme_name = word(e);
      else if (field == "order")
        c.scheme_order = static_cast<int>(count(e));
      else
        throw unknown();
    } else if (section == "output") {
      if (field == "sample_every")
        c.sample_every = count(e);
      else if (field == "energy")
        c.record_energy = boolean(e);
      else if (field == "autocorrelation")
        c.write_autocorrelation = boolean(e);
      else
        throw unknown();
    } else if (section == "converge") {
      if (field == "dt_max")
        c.converge_dt_max = number(e);
      else if (field == "n_halvings")
        c.converge_halvings = count(e);
      else
        throw unknown();
    } else if (section == "reverse") {
      if (field == "sweep") {
        const std::string w = word(e);
        if (w != "dt" && w != "time") throw ConfigError("reverse.sweep must be dt or time", e.line);
        c.reverse_time_sweep = w == "time";
      } else if (field == "dts") {
        c.reverse_dts = numbers(e);
      } else if (field == "times") {
        c.reverse_times = numbers(e);
      } else {
        throw unknown();
      }
    } else if (section == "gridscan") {
      if (field == "counts")
        c.gridscan_counts = counts(e);
      else if (field == "reference_count")
        c.gridscan_reference = count(e);
      else if (field == "fixed_q_ctr")
        c.gridscan_fixed_q_ctr = numbers(e);
      else
        throw unknown();
    } else if (section == "spectrum") {
      if (field == "t_damp")
        c.spectrum_t_damp = number(e);
      else if (field == "e_min")
        c.spectrum_e_min = number(e);
      else if (field == "e_max")
        c.spectrum_e_max = number(e);
      else
        throw unknown();
    } else if (section == "run" && field == "large") {
      c.large = boolean(e);
    } else {
      throw unknown();
    }
  }
  if (c.reference && c.reference->p_ctr.empty()) c.reference->p_ctr = c.grid.p_ctr;
  // A single count applies to every dimension.
  const std::size_t d = c.model_label == "henon_heiles" ? c.hh_dims : c.harmonic.q0.size();
  const std::size_t dims = c.model_label == "scattering" ? 2 : d;
  for (auto* g : {&c.grid, c.reference ? &*c.reference : nullptr})
    if (g && g->counts.size() == 1) g->counts.assign(dims, g->counts[0]);
  if (grid_form.box_line && (c.grid.q_min.empty() || c.grid.q_max.empty()))
    throw ConfigError("grid.q_min and grid.q_max must be given together", grid_form.box_line);
  if (ref_form.box_line && (c.reference->q_min.empty() || c.reference->q_max.empty()))
    throw ConfigError("reference.q_min and reference.q_max must be given together", ref_form.box_line);
  if (c.reference && c.reference->counts.empty())
    throw ConfigError("reference grid needs reference.counts", c.line_of("reference.q_min"));
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate(const ExperimentConfig& c, bool allow_large) {
  auto fail = [&](const std::string& what, const std::string& key) { throw ConfigError(what, c.line_of(key)); };

  if (!(c.dt > 0.0)) fail("propagation.dt must be positive", "propagation.dt");
  if (!(c.t_f > 0.0)) fail("propagation.t_f must be positive", "propagation.t_f");
  const double ratio = c.t_f / c.dt;
  const double steps = std::round(ratio);
  if (steps < 1.0 || std::abs(ratio - steps) > 2.0 * std::numeric_limits<double>::epsilon() * ratio)
    fail("t_f / dt = " + std::to_string(ratio) + " is not an integer step count", "propagation.t_f");
  const auto n = static_cast<std::size_t>(steps);
  if (c.sample_every == 0 || n % c.sample_every != 0)
    fail("output.sample_every must divide the step count " + std::to_string(n), "output.sample_every");

  const std::size_t d = c.model_label == "henon_heiles" ? c.hh_dims : c.make_model().dims();
  auto check_geometry = [&](const GridGeometry& g, const std::string& prefix) {
    if (g.counts.size() != d)
      fail(prefix + ".counts has " + std::to_string(g.counts.size()) + " entries but the model is " +
               std::to_string(d) + "-D",
           prefix + ".counts");
    for (std::size_t k : g.counts)
      if (!is_power_of_two(k)) fail(prefix + ".counts must be powers of two (got " + std::to_string(k) + ")", prefix + ".counts");
    try {
      (void)g.make();
    } catch (const InvalidArgument& err) {
      std::size_t line = c.line_of(prefix + ".counts");
      for (const char* k : {".q_min", ".q_max", ".q_ctr", ".dq", ".p_ctr"})
        line = std::max(line, c.line_of(prefix + k));
      throw ConfigError(err.what(), line);
    }
    std::size_t total = 1;
    for (std::size_t k : g.counts) total *= k;
    if (total > kLargeGridPoints && !allow_large)
      fail(prefix + " has " + std::to_string(total) + " points; rerun with --large", prefix + ".counts");
  };
  check_geometry(c.grid, "grid");
  if (c.reference) check_geometry(*c.reference, "reference");
  if (c.large && !allow_large) fail("this configuration is marked large; rerun with --large", "run.large");

  for (const auto* v : {&c.state_q0, &c.state_p0, &c.state_width})
    if (v->size() != d && v->size() != 1) fail("state vectors need one entry per dimension", "state.q0");
  for (double w : c.state_width)
    if (!(w > 0.0)) fail("state.width must be positive", "state.width");
  if (c.model_label == "harmonic" &&
      (c.harmonic.K.size() != c.harmonic.q0.size() || c.harmonic.q0.size() != c.harmonic.omegas.size()))
    fail("model.K, model.q0 and model.omega disagree in dimension", "model.K");

  try {
    (void)c.make_scheme();
  } catch (const UnsupportedScheme& err) {
    throw ConfigError(err.what(), std::max(c.line_of("scheme.name"), c.line_of("scheme.order")));
  }
  for (std::size_t k : c.gridscan_counts)
    if (!is_power_of_two(k)) fail("gridscan.counts must be powers of two", "gridscan.counts");
  if (c.gridscan_reference && !is_power_of_two(c.gridscan_reference))
    fail("gridscan.reference_count must be a power of two", "gridscan.reference_count");
  if (!(c.converge_dt_max > 0.0)) fail("converge.dt_max must be positive", "converge.dt_max");
  for (double x : c.reverse_dts)
    if (!(x > 0.0)) fail("reverse.dts must be positive", "reverse.dts");
  for (double x : c.reverse_times)
    if (!(x > 0.0)) fail("reverse.times must be positive", "reverse.times");
}

}  // namespace movgrid::cli
