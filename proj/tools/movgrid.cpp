#include <CLI11.hpp>
#include <iostream>

#include "movgrid/cli/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Moving-grid split-operator propagator"};
  app.require_subcommand(1);
  std::string config_path;
  movgrid::cli::RunOptions options;
  std::string out_dir = ".";

  const std::vector<std::pair<const char*, const char*>> commands{
      {"run", "propagate and write series.csv, final_state.mgwf and run.json"},
      {"converge", "time-step convergence table (convergence.csv)"},
      {"reverse", "forward-backward distances for naive and reversible grids (reversibility.csv)"},
      {"gridscan", "error versus points per dimension for adaptive and fixed grids (gridscan.csv)"},
      {"spectrum", "propagate, then Fourier transform the autocorrelation (spectrum.csv)"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", options.threads, "worker thread cap")->check(CLI::NonNegativeNumber);
    sub->add_flag("--large", options.large, "allow configurations above the desk-scale size limit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : movgrid::cli::kConfigError;
  }
  options.out_dir = out_dir;
  const std::string subcommand = app.get_subcommands().front()->get_name();
  return movgrid::cli::execute(subcommand, std::filesystem::path(config_path), options, std::cerr);
}
