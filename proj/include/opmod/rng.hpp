#ifndef OPMOD_RNG_HPP
#define OPMOD_RNG_HPP

//
// Module      : rng
// Description : counter-based seedable random streams (splitmix64 finalizer)
//

#include <cmath>
#include <complex>
#include <cstdint>

namespace opmod {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Output depends only on (key, counter), so independent streams can be
// derived for parallel loops and merged deterministically.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix64(seed ^ mix64(stream * 0x9e3779b97f4a7c15ULL + 0x6a09e667f3bcc909ULL))) {}

  Rng substream(std::uint64_t i) const { return Rng(key_, mix64(i + 1)); }

  std::uint64_t next_u64() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * (++ctr_)); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(t);
    have_cached_ = true;
    return r * std::cos(t);
  }

  std::complex<double> complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re, im};
  }

  // uniform on the closed disc of the given radius
  std::complex<double> disc_point(double radius) {
    const double rho = radius * std::sqrt(uniform());
    const double t = 6.283185307179586476925286766559 * uniform();
    return {rho * std::cos(t), rho * std::sin(t)};
  }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace opmod

#endif
