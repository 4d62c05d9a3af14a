#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "movgrid/errors.hpp"

namespace movgrid::detail {
namespace {

struct PlanKey {
  std::vector<std::size_t> counts;
  int sign;
  bool aligned;
  auto operator<=>(const PlanKey&) const = default;
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(const std::vector<std::size_t>& counts, int sign, bool aligned) {
    std::lock_guard lock(mutex_);
    PlanKey key{counts, sign, aligned};
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    std::size_t total = 1;
    std::vector<int> n(counts.size());
    for (std::size_t l = 0; l < counts.size(); ++l) {
      n[l] = static_cast<int>(counts[l]);
      total *= counts[l];
    }
    // Planning on scratch memory: FFTW_ESTIMATE plans are deterministic and
    // independent of the data, which keeps reruns bit-identical.
    auto* scratch = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
    if (!scratch) throw NumericalFailure("FFT scratch allocation failed");
    unsigned flags = FFTW_ESTIMATE;
    if (!aligned) flags |= FFTW_UNALIGNED;
    fftw_plan plan = fftw_plan_dft(static_cast<int>(n.size()), n.data(), scratch, scratch, sign, flags);
    fftw_free(scratch);
    if (!plan) throw NumericalFailure("FFTW could not create a plan");
    plans_.emplace(std::move(key), plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

std::uint64_t& fft_counter() noexcept {
  thread_local std::uint64_t count = 0;
  return count;
}

void fft_inplace(std::span<cplx> data, const std::vector<std::size_t>& counts, FftSign sign) {
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  const bool aligned = fftw_alignment_of(reinterpret_cast<double*>(ptr)) == 0;
  fftw_plan plan = cache().get(counts, static_cast<int>(sign), aligned);
  fftw_execute_dft(plan, ptr, ptr);
  ++fft_counter();
}

}  // namespace movgrid::detail
