#pragma once

#include <filesystem>
#include <iosfwd>

#include "movgrid/wave_state.hpp"

namespace movgrid {

/// MGWF1 layout, all fields little-endian:
///   "MGWF1" | u32 D | u64 counts[D] | f64 dq[D] | f64 dp[D] | f64 q_ctr[D] |
///   f64 p_ctr[D] | u8 representation (0 position, 1 momentum) | f64 hbar |
///   N pairs of f64 (re, im) in row-major multi-index order.
void write_checkpoint(std::ostream& out, const WaveState& state);
void write_checkpoint(const std::filesystem::path& path, const WaveState& state);

/// Throws InvalidArgument on a malformed or truncated file.
WaveState read_checkpoint(std::istream& in);
WaveState read_checkpoint(const std::filesystem::path& path);

}  // namespace movgrid
