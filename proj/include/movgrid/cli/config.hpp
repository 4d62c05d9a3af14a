#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "movgrid/composition.hpp"
#include "movgrid/grid.hpp"
#include "movgrid/model.hpp"
#include "movgrid/propagator.hpp"

namespace movgrid::cli {

/// Grid geometry as written in a config: either a box [q_min, q_max) or a
/// center and spacing. Resolved against a point count by `make`.
struct GridGeometry {
  std::vector<std::size_t> counts;
  std::vector<double> q_min, q_max;  // box form
  std::vector<double> q_ctr, dq;     // center form
  std::vector<double> p_ctr;

  GridSpec make() const;
};

/// Everything a subcommand needs. Defaults come from the model preset; every
/// field can be overridden by a config key (see README for the grammar).
struct ExperimentConfig {
  std::string model_label;
  std::size_t hh_dims = 4;
  double hh_lambda = 0.111803;
  HarmonicParams harmonic = HarmonicParams::table_one();

  GridGeometry grid;
  /// Initial Gaussian; preset values reproduce initial_state_for(label).
  std::vector<double> state_q0, state_p0, state_width;
  bool state_overridden = false;

  GridMode mode = GridMode::reversible_adaptive;
  Flavor flavor = Flavor::tvt;
  std::string scheme_name = "optimal";
  int scheme_order = 10;
  double dt = 0.0;
  double t_f = 0.0;
  /// round(t_f / dt); validate() checks that the ratio is an integer.
  std::size_t steps() const;
  std::size_t sample_every = 1;
  bool record_energy = true;
  bool write_autocorrelation = false;

  /// Fixed-grid reference run compared against the main run at every sample.
  std::optional<GridGeometry> reference;

  double converge_dt_max = 0.0;
  std::size_t converge_halvings = 6;

  bool reverse_time_sweep = false;
  std::vector<double> reverse_dts;
  std::vector<double> reverse_times;

  std::vector<std::size_t> gridscan_counts;
  std::size_t gridscan_reference = 0;
  std::vector<double> gridscan_fixed_q_ctr;

  double spectrum_t_damp = 30.0;
  double spectrum_e_min = 0.0;
  double spectrum_e_max = -1.0;

  /// Marks configurations that need the --large flag.
  bool large = false;

  /// key = value pairs in file order, for provenance, with their lines.
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<std::size_t> entry_lines;

  /// Line of `key` in the source text, 0 when it came from the preset.
  std::size_t line_of(const std::string& key) const;

  Model make_model() const;
  WaveState make_initial_state(const GridSpec& grid) const;
  CompositionScheme make_scheme() const;
  StepMode step_mode() const { return {mode, flavor}; }
};

/// Parses the key = value format. Lines are `key = value`, blank, or
/// comments starting with '#'. Numeric values may be written as fractions
/// "a/b"; lists are separated by spaces or commas. Throws ConfigError with
/// the offending line number.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Checks cross-field constraints (integer step count, sampling divides the
/// step count, power-of-two counts, size limits). `allow_large` lifts the
/// size limit.
void validate(const ExperimentConfig& config, bool allow_large);

/// Grids above this many points need --large.
inline constexpr std::size_t kLargeGridPoints = std::size_t{1} << 21;

}  // namespace movgrid::cli
