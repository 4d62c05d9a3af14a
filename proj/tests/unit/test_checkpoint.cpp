#include <doctest.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <sstream>

#include "../support/oracles.hpp"
#include "movgrid/checkpoint.hpp"
#include "movgrid/errors.hpp"
#include "movgrid/transform.hpp"

using namespace movgrid;

namespace {

WaveState sample_state() {
  const GridSpec g = make_grid(std::vector<std::size_t>{4, 8}, std::vector<double>{0.3, -1.1},
                               std::vector<double>{0.25, 0.5}, std::vector<double>{2.0, 0.125}, 0.7);
  std::mt19937_64 rng(17);
  return WaveState(g, Representation::position, oracle::random_amplitudes(g.size(), rng));
}

void check_identical(const WaveState& a, const WaveState& b) {
  CHECK(a.grid() == b.grid());
  CHECK(a.representation() == b.representation());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::bit_cast<std::uint64_t>(a.amplitudes()[i].real()) ==
          std::bit_cast<std::uint64_t>(b.amplitudes()[i].real()));
    CHECK(std::bit_cast<std::uint64_t>(a.amplitudes()[i].imag()) ==
          std::bit_cast<std::uint64_t>(b.amplitudes()[i].imag()));
  }
}

}  // namespace

TEST_CASE("checkpoint round trip is bit-exact") {
  const WaveState psi = sample_state();
  for (const WaveState& s : {psi, to_momentum(psi)}) {
    std::stringstream buf;
    write_checkpoint(buf, s);
    check_identical(read_checkpoint(buf), s);
  }

  const auto path = std::filesystem::temp_directory_path() / "movgrid_checkpoint_test.mgwf";
  write_checkpoint(path, psi);
  check_identical(read_checkpoint(path), psi);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_checkpoint(path), InvalidArgument);
}

TEST_CASE("checkpoint layout") {
  const WaveState psi = sample_state();
  std::stringstream buf;
  write_checkpoint(buf, psi);
  const std::string bytes = buf.str();
  const std::size_t d = 2, n = 32;
  CHECK(bytes.size() == 5 + 4 + 8 * d + 4 * 8 * d + 1 + 8 + 16 * n);
  CHECK(bytes.substr(0, 5) == "MGWF1");
  CHECK(bytes.substr(5, 4) == std::string("\x02\x00\x00\x00", 4));
  CHECK(bytes.substr(9, 8) == std::string("\x04\0\0\0\0\0\0\0", 8));
  CHECK(bytes.substr(17, 8) == std::string("\x08\0\0\0\0\0\0\0", 8));
  double dq0 = 0;
  std::memcpy(&dq0, bytes.data() + 25, 8);  // little-endian host
  CHECK(dq0 == 0.25);
  const std::size_t rep_at = 5 + 4 + 8 * d + 4 * 8 * d;
  CHECK(bytes[rep_at] == 0);
  double hbar = 0;
  std::memcpy(&hbar, bytes.data() + rep_at + 1, 8);
  CHECK(hbar == 0.7);
  double re = 0;
  std::memcpy(&re, bytes.data() + rep_at + 9, 8);
  CHECK(re == psi.amplitudes()[0].real());
}

TEST_CASE("malformed checkpoints are rejected") {
  std::stringstream buf;
  write_checkpoint(buf, sample_state());
  const std::string bytes = buf.str();

  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_WITH_AS(read_checkpoint(truncated), "checkpoint is truncated", InvalidArgument);

  std::string bad = bytes;
  bad[0] = 'X';
  std::stringstream bad_magic(bad);
  CHECK_THROWS_AS(read_checkpoint(bad_magic), InvalidArgument);

  std::string bad_rep = bytes;
  bad_rep[5 + 4 + 16 + 64] = 7;
  std::stringstream bad_flag(bad_rep);
  CHECK_THROWS_AS(read_checkpoint(bad_flag), InvalidArgument);

  std::string bad_dp = bytes;
  const double wrong = 1.0;
  std::memcpy(bad_dp.data() + 5 + 4 + 16 + 16, &wrong, 8);
  std::stringstream inconsistent(bad_dp);
  CHECK_THROWS_AS(read_checkpoint(inconsistent), InvalidArgument);
}
