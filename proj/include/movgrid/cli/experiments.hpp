#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "movgrid/cli/config.hpp"

namespace movgrid::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalFailure = 3 };

struct RunOptions {
  std::filesystem::path out_dir = ".";
  bool large = false;
  /// Caps the OpenMP worker count; 0 keeps the runtime default.
  int threads = 0;
};

/// Runs one subcommand ("run", "converge", "reverse", "gridscan",
/// "spectrum") and writes its artifacts into out_dir. Errors are reported
/// on `err` and mapped to exit codes: configuration and setup problems give
/// 2, non-finite amplitudes or degenerate states give 3.
int execute(const std::string& subcommand, const ExperimentConfig& config, const RunOptions& options,
            std::ostream& err);
int execute(const std::string& subcommand, const std::filesystem::path& config_path, const RunOptions& options,
            std::ostream& err);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

}  // namespace movgrid::cli
