#include <doctest.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "movgrid/cli/config.hpp"
#include "movgrid/cli/experiments.hpp"
#include "movgrid/errors.hpp"

using namespace movgrid;
using namespace movgrid::cli;
namespace fs = std::filesystem;

namespace {

std::size_t error_line(const std::string& text) {
  try {
    validate(parse_config(text), false);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return std::numeric_limits<std::size_t>::max();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("movgrid_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

const std::string kSmallHarmonic =
    "model.label = harmonic\n"
    "grid.counts = 8\n"
    "propagation.dt = 1/8\n"
    "propagation.t_f = 1\n"
    "scheme.name = strang\n"
    "scheme.order = 2\n";

}  // namespace

TEST_CASE("presets fill a complete configuration") {
  const auto h = parse_config("model.label = harmonic\n");
  CHECK(h.grid.counts == std::vector<std::size_t>{32, 32, 32});
  CHECK(h.dt == 50.0 / 512);
  CHECK(h.steps() == 512);
  CHECK(h.scheme_order == 10);
  CHECK_NOTHROW(validate(h, false));

  const auto s = parse_config("model.label = scattering\n");
  CHECK(s.flavor == Flavor::vtv);
  CHECK(s.grid.p_ctr == std::vector<double>{0.0, -3.56});
  CHECK_NOTHROW(validate(s, false));

  const auto hh = parse_config("model.label = henon_heiles\nmodel.dims = 6\n");
  CHECK(hh.make_model().dims() == 6);
  CHECK(hh.grid.make().size() == std::size_t{1} << 18);
  CHECK(hh.scheme_name == "suzuki");
}

TEST_CASE("values, fractions and lists") {
  const auto c = parse_config(
      "# comment line\n"
      "model.label = harmonic   # trailing comment\n"
      "grid.counts = 16, 8 ,16\n"
      "grid.q_ctr = 1/2 0 -3/4\n"
      "grid.dq = 0.25\n"
      "propagation.dt = 1/16\n"
      "propagation.t_f = 2\n"
      "output.energy = false\n");
  CHECK(c.grid.counts == std::vector<std::size_t>{16, 8, 16});
  CHECK(c.grid.q_ctr == std::vector<double>{0.5, 0.0, -0.75});
  CHECK(c.dt == 0.0625);
  CHECK_FALSE(c.record_energy);
  const GridSpec g = c.grid.make();
  CHECK(g.dq()[1] == 0.25);
  CHECK(c.line_of("grid.dq") == 5);
  CHECK(c.line_of("scheme.name") == 0);
}

TEST_CASE("config errors carry the offending line") {
  CHECK(error_line("model.label = harmonic\ngrid.counts = 8\nbogus.key = 3\n") == 3);
  CHECK(error_line("model.label = harmonic\ngrid.dq = 0.1\ngrid.dq = 0.2\n") == 3);
  CHECK(error_line("model.label = harmonic\n\ngrid.dq =\n") == 3);
  CHECK(error_line("model.label = harmonic\nno equals sign\n") == 2);
  CHECK(error_line("model.label = harmonic\ngrid.dq = 1/0\n") == 2);
  CHECK(error_line("model.label = harmonic\ngrid.dq = abc\n") == 2);
  CHECK(error_line("model.label = harmonic\ngrid.q_min = 0 0 0\ngrid.dq = 0.1\n") == 3);
  CHECK(error_line("model.label = harmonic\npropagation.mode = sideways\n") == 2);
  CHECK(error_line("model.label = scattering\nmodel.dims = 3\n") == 2);
  CHECK(error_line("model.label = harmonic\nscheme.name = strang\nscheme.order = 4\n") == 3);
  CHECK(error_line("model.label = nowhere\n") == 1);
  CHECK(error_line("grid.counts = 8\n") == 0);
}

TEST_CASE("cross-field validation") {
  // 1 / 0.3 is not an integer; the error points at t_f.
  CHECK(error_line("model.label = harmonic\npropagation.dt = 0.3\npropagation.t_f = 1\n") == 3);
  // 0.1 * 10 is 1 only up to roundoff, which is accepted.
  CHECK(error_line("model.label = harmonic\npropagation.dt = 0.1\npropagation.t_f = 1\n") ==
        std::numeric_limits<std::size_t>::max());
  CHECK(error_line(kSmallHarmonic + "output.sample_every = 3\n") == 7);
  CHECK(error_line("model.label = harmonic\ngrid.counts = 12\n") == 2);
  CHECK(error_line("model.label = harmonic\ngrid.counts = 8 8\n") == 2);
  CHECK(error_line("model.label = harmonic\nstate.width = 1 -1 1\n") == 2);
  CHECK(error_line("model.label = harmonic\ngridscan.counts = 8 24\n") == 2);

  const auto big = parse_config("model.label = henon_heiles\nmodel.dims = 8\n");
  CHECK_THROWS_AS(validate(big, false), ConfigError);
  CHECK_NOTHROW(validate(big, true));
  const auto flagged = parse_config("model.label = harmonic\nrun.large = true\n");
  CHECK_THROWS_AS(validate(flagged, false), ConfigError);
}

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(0x666d74);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> ex(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(mant(rng), ex(rng));
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.0) == "-2");
}

TEST_CASE("run writes reproducible artifacts") {
  const auto config = parse_config(kSmallHarmonic + "output.sample_every = 2\n");
  const fs::path a = scratch("run_a"), b = scratch("run_b");
  std::ostringstream err;
  REQUIRE(execute("run", config, {a, false, 1}, err) == kOk);
  REQUIRE(execute("run", config, {b, false, 1}, err) == kOk);

  const std::string series = slurp(a / "series.csv");
  CHECK(series.rfind("t (n.u.),norm (n.u.),energy (n.u.),q_ctr_1 (n.u.)", 0) == 0);
  std::size_t rows = 0;
  for (char ch : series) rows += ch == '\n';
  CHECK(rows == 1 + 4);
  CHECK(series == slurp(b / "series.csv"));
  CHECK(slurp(a / "final_state.mgwf") == slurp(b / "final_state.mgwf"));

  const std::string meta = slurp(a / "run.json");
  CHECK(meta.find("\"status\": \"ok\"") != std::string::npos);
  CHECK(meta.find("\"steps_completed\": 8") != std::string::npos);
  CHECK_FALSE(fs::exists(a / "autocorr.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("exit codes") {
  std::ostringstream err;
  const fs::path dir = scratch("codes");
  CHECK(execute("levitate", parse_config(kSmallHarmonic), {dir, false, 1}, err) == kConfigError);
  CHECK(execute("run", parse_config(kSmallHarmonic + "output.sample_every = 3\n"), {dir, false, 1}, err) ==
        kConfigError);
  CHECK(execute("run", dir / "missing.cfg", {dir, false, 1}, err) == kConfigError);

  // A step far beyond the center stability threshold overflows the centers.
  const auto blowup = parse_config(
      "model.label = harmonic\ngrid.counts = 8\npropagation.dt = 1e6\npropagation.t_f = 1e8\n"
      "scheme.name = strang\nscheme.order = 2\n");
  err.str("");
  CHECK(execute("run", blowup, {dir, false, 1}, err) == kNumericalFailure);
  CHECK(err.str().find("numerical failure") != std::string::npos);
  const std::string meta = slurp(dir / "run.json");
  CHECK(meta.find("\"status\": \"numerical_failure\"") != std::string::npos);
  CHECK(fs::exists(dir / "series.csv"));
  fs::remove_all(dir);
}

TEST_CASE("converge writes the fitted order") {
  const auto config = parse_config(
      "model.label = henon_heiles\nmodel.dims = 2\npropagation.t_f = 2\nconverge.dt_max = 0.2\n"
      "converge.n_halvings = 5\n");
  const fs::path dir = scratch("converge");
  std::ostringstream err;
  REQUIRE(execute("converge", config, {dir, false, 1}, err) == kOk);
  std::istringstream csv(slurp(dir / "convergence.csv"));
  std::string line, fitted;
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    if (line.rfind("# fitted_order,", 0) == 0) fitted = line.substr(15);
    else if (!line.empty() && line[0] != '#') ++rows;
  }
  CHECK(rows == 1 + 5);
  REQUIRE_FALSE(fitted.empty());
  CHECK(std::abs(std::stod(fitted) - 4.0) <= 0.5);
  fs::remove_all(dir);
}
