#include "aoaloc/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>

#include "aoaloc/error.hpp"

namespace aoaloc {
namespace {

// FFTW planning is not thread-safe but executing a plan on new arrays is, so
// plans are created once per (size, direction) under a lock and reused.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan forward(std::size_t n) { return get(n, true); }
  fftw_plan inverse(std::size_t n) { return get(n, false); }

 private:
  fftw_plan get(std::size_t n, bool forward) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(n, forward);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    std::vector<double> real(n);
    std::vector<Complex> spec(n / 2 + 1);
    auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    const int len = static_cast<int>(n);
    fftw_plan plan = forward ? fftw_plan_dft_r2c_1d(len, real.data(), cplx, flags)
                             : fftw_plan_dft_c2r_1d(len, cplx, real.data(), flags);
    plans_.emplace(key, plan);
    return plan;
  }

  std::mutex mutex_;
  std::map<std::pair<std::size_t, bool>, fftw_plan> plans_;
};

PlanCache& plans() {
  static PlanCache cache;
  return cache;
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<Complex> rfft(std::span<const double> x, std::size_t n) {
  if (n == 0) throw InvalidArgument("rfft length must be positive");
  std::vector<double> input(n, 0.0);
  std::copy_n(x.begin(), std::min(n, x.size()), input.begin());
  std::vector<Complex> out(n / 2 + 1);
  fftw_execute_dft_r2c(plans().forward(n), input.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> irfft(std::span<const Complex> bins, std::size_t n) {
  if (n == 0) throw InvalidArgument("irfft length must be positive");
  if (bins.size() != n / 2 + 1) throw InvalidArgument("irfft: bin count must be n/2 + 1");
  // c2r overwrites its input.
  std::vector<Complex> scratch(bins.begin(), bins.end());
  std::vector<double> out(n);
  fftw_execute_dft_c2r(plans().inverse(n), reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.data());
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace aoaloc
