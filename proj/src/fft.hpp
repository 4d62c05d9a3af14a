#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "movgrid/aligned.hpp"

namespace movgrid::detail {

enum class FftSign { forward = -1, backward = +1 };

/// Unnormalized in-place multi-dimensional DFT over a row-major tensor:
/// out_K = sum_J exp(sign * 2 pi i <K,J>) in_J.
void fft_inplace(std::span<cplx> data, const std::vector<std::size_t>& counts, FftSign sign);

/// Number of multi-dimensional transforms executed on the calling thread.
std::uint64_t& fft_counter() noexcept;

}  // namespace movgrid::detail
