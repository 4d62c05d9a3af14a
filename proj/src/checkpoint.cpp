#include "movgrid/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string_view>

#include "movgrid/errors.hpp"

namespace movgrid {
namespace {

constexpr std::string_view kMagic = "MGWF1";

template <class U>
void put_le(std::ostream& out, U value) {
  std::array<char, sizeof(U)> bytes;
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

template <class U>
U get_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
    throw InvalidArgument("checkpoint is truncated");
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

std::vector<double> get_f64s(std::istream& in, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = get_f64(in);
  return v;
}

}  // namespace

void write_checkpoint(std::ostream& out, const WaveState& state) {
  const GridSpec& g = state.grid();
  out.write(kMagic.data(), kMagic.size());
  put_le(out, static_cast<std::uint32_t>(g.dims()));
  for (std::size_t n : g.counts()) put_le(out, static_cast<std::uint64_t>(n));
  for (const auto* v : {&g.dq(), &g.dp(), &g.q_ctr(), &g.p_ctr()})
    for (double x : *v) put_f64(out, x);
  put_le(out, static_cast<std::uint8_t>(state.representation() == Representation::momentum ? 1 : 0));
  put_f64(out, g.hbar());
  for (const cplx& c : state.amplitudes()) {
    put_f64(out, c.real());
    put_f64(out, c.imag());
  }
  if (!out) throw InvalidArgument("failed to write checkpoint");
}

void write_checkpoint(const std::filesystem::path& path, const WaveState& state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  write_checkpoint(out, state);
}

WaveState read_checkpoint(std::istream& in) {
  std::array<char, 5> magic{};
  if (!in.read(magic.data(), magic.size()) || std::string_view(magic.data(), magic.size()) != kMagic)
    throw InvalidArgument("not an MGWF1 checkpoint");
  const std::uint32_t d = get_le<std::uint32_t>(in);
  if (d == 0 || d > 64) throw InvalidArgument("checkpoint has an invalid dimension count");
  std::vector<std::size_t> counts(d);
  for (auto& n : counts) n = static_cast<std::size_t>(get_le<std::uint64_t>(in));
  const auto dq = get_f64s(in, d);
  const auto dp = get_f64s(in, d);
  const auto q_ctr = get_f64s(in, d);
  const auto p_ctr = get_f64s(in, d);
  const auto rep = get_le<std::uint8_t>(in);
  if (rep > 1) throw InvalidArgument("checkpoint has an invalid representation flag");
  const double hbar = get_f64(in);

  GridSpec grid = make_grid(counts, q_ctr, dq, p_ctr, hbar);
  for (std::size_t l = 0; l < d; ++l)
    if (std::abs(grid.dp()[l] - dp[l]) > 1e-12 * dp[l])
      throw InvalidArgument("checkpoint momentum spacing is inconsistent with its position spacing");
  Amplitudes amps(grid.size());
  for (auto& c : amps) {
    const double re = get_f64(in);
    const double im = get_f64(in);
    c = {re, im};
  }
  return WaveState(std::move(grid), rep ? Representation::momentum : Representation::position, std::move(amps));
}

WaveState read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace movgrid
