#ifndef OPMOD_FFT_UTILS_HPP
#define OPMOD_FFT_UTILS_HPP

// internal: cached FFTW plans for square 2D complex transforms

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <vector>

namespace opmod::detail {

// in-place 2D DFT on an n x n row-major array; sign +1 = e^{+i...} (FFTW
// backward), sign -1 = forward. Plans are cached per (n, sign) and executed
// through the new-array interface.
inline void fft2_cached(std::complex<double>* data, std::size_t n, int sign) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find({n, sign});
    if (it == cache.end()) {
      std::vector<std::complex<double>> scratch(n * n);
      plan = fftw_plan_dft_2d(static_cast<int>(n), static_cast<int>(n),
                              reinterpret_cast<fftw_complex*>(scratch.data()),
                              reinterpret_cast<fftw_complex*>(scratch.data()),
                              sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
      cache.emplace(std::make_pair(n, sign), plan);
    } else {
      plan = it->second;
    }
  }
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data),
                   reinterpret_cast<fftw_complex*>(data));
}

}  // namespace opmod::detail

#endif
