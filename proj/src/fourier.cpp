#include "opmod/fourier.hpp"

#include <gsl/gsl_sf_bessel.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "../src/fft_utils.hpp"
#include "opmod/quadrature.hpp"

namespace opmod::fourier {

namespace {

constexpr double kPi = 3.141592653589793238462643383280;
constexpr double kTwoPi = 2.0 * kPi;

bool is_pow2(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

// in-place 2D DFT, sign +1 (FFTW backward) or -1 (forward)
void fft2_inplace(std::vector<cplx>& data, std::size_t n, int sign) {
  detail::fft2_cached(data.data(), n, sign);
}

double sincd(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace

double bessel_j(int order, double x) {
  if (!(x >= 0.0) || !std::isfinite(x))
    throw std::invalid_argument("bessel_j: x must be finite and >= 0");
  switch (order) {
    case 0: return gsl_sf_bessel_J0(x);
    case 1: return gsl_sf_bessel_J1(x);
    case 2: return gsl_sf_bessel_Jn(2, x);
    default: throw std::invalid_argument("bessel_j: order must be 0, 1 or 2");
  }
}

InverseFourierResult inverse_fourier_grid(const std::function<cplx(cplx)>& f,
                                          const GridSpec& spec, const FourierOptions& opt) {
  if (!is_pow2(spec.samples))
    throw std::invalid_argument("inverse_fourier_grid: samples per axis must be a power of two");
  if (!(spec.half_width > 0.0))
    throw std::invalid_argument("inverse_fourier_grid: half_width must be positive");
  if (opt.tail) {
    const RadialTail& t = *opt.tail;
    const bool supported = (t.harmonic == 1 && t.power == 1.0) ||
                           (t.harmonic == 2 && t.power == 2.0);
    if (!supported)
      throw std::invalid_argument(
          "inverse_fourier_grid: tail correction supports (harmonic,power) = (1,1) or (2,2)");
  }

  const std::size_t n = spec.samples;
  const double w = spec.half_width;
  const double dx = 2.0 * w / static_cast<double>(n);
  const double rc = dx * 0.7071067811865476;  // circumscribed cell radius

  std::vector<double> kinks = opt.kink_radii;
  kinks.push_back(w);  // the radial window edge is always a kink of the sampled product

  const int ss = std::max(1, opt.supersample);
  const int ks = std::max(ss, opt.kink_supersample);

  std::vector<cplx> samples(n * n);
#pragma omp parallel for schedule(static)
  for (long long iyl = 0; iyl < static_cast<long long>(n); ++iyl) {
    const std::size_t iy = static_cast<std::size_t>(iyl);
    const double cy = -w + (static_cast<double>(iy) + 0.5) * dx;
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double cx = -w + (static_cast<double>(ix) + 0.5) * dx;
      const double rho = std::hypot(cx, cy);
      if (rho >= w + rc) {
        samples[iy * n + ix] = 0.0;
        continue;
      }
      bool near_kink = false;
      for (double kr : kinks)
        if (std::abs(rho - kr) <= rc) near_kink = true;
      const int s = near_kink ? ks : ss;
      cplx acc = 0.0;
      for (int a = 0; a < s; ++a) {
        const double px = cx + dx * ((a + 0.5) / s - 0.5);
        for (int b = 0; b < s; ++b) {
          const double py = cy + dx * ((b + 0.5) / s - 0.5);
          if (px * px + py * py > w * w) continue;  // radial window
          acc += f(cplx(px, py));
        }
      }
      samples[iy * n + ix] = acc / static_cast<double>(s * s);
    }
  }

  fft2_inplace(samples, n, +1);

  InverseFourierResult out;
  out.grid.n = n;
  const double kappa = kPi / w;  // output node spacing
  out.grid.step = kappa;
  out.grid.origin = -kappa * static_cast<double>(n / 2);
  out.grid.values.assign(n * n, 0.0);

  const double scale = dx * dx / (4.0 * kPi * kPi);
  const double phase_base = (-w + 0.5 * dx) * kappa;

  for (std::size_t iy = 0; iy < n; ++iy) {
    const long long kyp = static_cast<long long>(iy) - static_cast<long long>(n / 2);
    const std::size_t wy = static_cast<std::size_t>((kyp + static_cast<long long>(n)) %
                                                    static_cast<long long>(n));
    const cplx py = std::polar(1.0, phase_base * static_cast<double>(kyp));
    const double sy = sincd(0.5 * dx * kappa * static_cast<double>(kyp));
    for (std::size_t ix = 0; ix < n; ++ix) {
      const long long kxp = static_cast<long long>(ix) - static_cast<long long>(n / 2);
      const std::size_t wx = static_cast<std::size_t>((kxp + static_cast<long long>(n)) %
                                                      static_cast<long long>(n));
      const cplx px = std::polar(1.0, phase_base * static_cast<double>(kxp));
      const double sx = sincd(0.5 * dx * kappa * static_cast<double>(kxp));
      cplx v = scale * px * py * samples[wy * n + wx] / (sx * sy);
      out.grid.value(ix, iy) = v;
    }
  }

  if (opt.tail) {
    const RadialTail& t = *opt.tail;
#pragma omp parallel for schedule(static)
    for (long long iyl = 0; iyl < static_cast<long long>(n); ++iyl) {
      const std::size_t iy = static_cast<std::size_t>(iyl);
      for (std::size_t ix = 0; ix < n; ++ix) {
        const cplx zeta = out.grid.node(ix, iy);
        const double az = std::abs(zeta);
        if (az <= 0.0) continue;  // harmonics >= 1 integrate to zero at the origin
        const double theta = std::arg(zeta);
        cplx corr;
        if (t.harmonic == 1) {
          corr = t.coeff * cplx(0.0, 1.0) * std::polar(1.0, -theta) *
                 (gsl_sf_bessel_J0(w * az) / az) / kTwoPi;
        } else {
          corr = -t.coeff * std::polar(1.0, -2.0 * theta) *
                 (gsl_sf_bessel_J1(w * az) / (w * az)) / kTwoPi;
        }
        out.grid.value(ix, iy) += corr;
      }
    }
  }

  // heuristic error estimate: worst magnitude on the two outermost rings as an
  // alias proxy, plus a cell-averaging residual probe
  double ring_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t ring = 0; ring < 2; ++ring) {
      ring_max = std::max(ring_max, std::abs(out.grid.value(i, ring)));
      ring_max = std::max(ring_max, std::abs(out.grid.value(i, n - 1 - ring)));
      ring_max = std::max(ring_max, std::abs(out.grid.value(ring, i)));
      ring_max = std::max(ring_max, std::abs(out.grid.value(n - 1 - ring, i)));
    }
  }
  out.error_estimate = 4.0 * ring_max + 1e-15 * static_cast<double>(n);
  return out;
}

L1HatResult l1hat_norm(const std::function<cplx(cplx)>& f, double radial_decay_exponent,
                       const GridSpec& spec, const FourierOptions& opt) {
  const double p = radial_decay_exponent;
  if (!(p > 2.0))
    throw std::invalid_argument(
        "l1hat_norm: decay exponent must exceed 2 (tail cannot be bounded otherwise)");
  InverseFourierResult r = inverse_fourier_grid(f, spec, opt);
  const std::size_t n = r.grid.n;
  const double cell = r.grid.step * r.grid.step;
  const double rout = r.grid.step * static_cast<double>(n / 2);

  double value = 0.0;
  double cmeas = 0.0;
  for (std::size_t iy = 0; iy < n; ++iy)
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double az = std::abs(r.grid.node(ix, iy));
      if (az > rout) continue;  // integrate over the inscribed disc
      const double m = std::abs(r.grid.value(ix, iy));
      value += m * cell;
      if (az >= 0.75 * rout) cmeas = std::max(cmeas, m * std::pow(1.0 + az, p));
    }
  const double u = 1.0 + rout;
  const double tail = kTwoPi * cmeas *
                      (std::pow(u, 2.0 - p) / (p - 2.0) - std::pow(u, 1.0 - p) / (p - 1.0));
  L1HatResult out;
  out.value = value + tail;
  out.error = tail + r.error_estimate * rout * rout;
  out.measured_tail_constant = cmeas;
  return out;
}

cplx psi(cplx z) {
  const double a = std::abs(z);
  if (a < 1.0) return std::conj(z);
  return 1.0 / z;
}

namespace {

PsiConstant compute_psi_constant() {
  // c = Integral_0^inf |J1(r)|/r dr; split at the zeros of J1 where the sign
  // is constant, then an asymptotic tail from the last zero used.
  const double target = 1.0e4;
  auto j1_over_r = [](double r) {
    if (r < 1e-12) return 0.5;
    return gsl_sf_bessel_J1(r) / r;
  };
  double acc = 0.0;
  double prev = 0.0;
  double last_zero = 0.0;
  const double seg_tol = 1e-11;
  for (unsigned s = 1;; ++s) {
    const double z = gsl_sf_bessel_zero_J1(s);
    acc += std::abs(adaptive_simpson(j1_over_r, prev, z, seg_tol));
    prev = z;
    if (z >= target) {
      last_zero = z;
      break;
    }
  }
  // tail: |J1(r)| ~ sqrt(2/(pi r))|cos(r - 3pi/4)|; the |cos| mean 2/pi gives
  // sqrt(2/pi)*(2/pi)*2/sqrt(X); the oscillatory and amplitude corrections are
  // O(X^{-3/2}) with a modest constant
  const double x = last_zero;
  const double tail = std::sqrt(2.0 / kPi) * (2.0 / kPi) * 2.0 / std::sqrt(x);
  const double tail_residual = 5.0 * std::pow(x, -1.5);
  PsiConstant out;
  out.c = acc + tail;
  out.quadrature_error = tail_residual + seg_tol * (x / kPi) + 1e-12;
  return out;
}

}  // namespace

const PsiConstant& psi_constant() {
  static const PsiConstant value = compute_psi_constant();
  return value;
}

double psi_l1hat_norm() { return 2.0 * psi_constant().c; }

double smooth_bump(double x) {
  const double a = std::abs(x);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  auto ramp = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  const double up = ramp(2.0 - a);
  const double down = ramp(a - 1.0);
  return up / (up + down);
}

const L1HatResult& psi_band_l1hat() {
  static const L1HatResult value = [] {
    auto band = [](cplx z) -> cplx {
      const double a = std::abs(z);
      if (a <= 0.0) return 0.0;
      const double radial = smooth_bump(0.5 * a) - smooth_bump(a);
      if (radial == 0.0) return 0.0;
      return std::conj(z) / z * radial;
    };
    // support is the annulus [1,4]; the transform decays fast, p = 4 measured
    GridSpec spec{8.0, 1024};
    return l1hat_norm(band, 4.0, spec);
  }();
  return value;
}

DyadicH dyadic_h(double delta, double r) {
  if (!(delta > 0.0) || !(delta < r))
    throw std::invalid_argument("dyadic_h: need 0 < delta < r");
  // n bands cover delta <= |z| <= delta 2^{n-1}; choose the least n reaching r
  const double ratio = 2.0 * r / delta;
  const std::size_t bands =
      static_cast<std::size_t>(std::max(1.0, std::ceil(std::log2(ratio) - 1e-12)));
  const L1HatResult& band = psi_band_l1hat();
  DyadicH out;
  out.bands = bands;
  out.band_norm = band.value;
  out.band_norm_error = band.error;
  out.bound = static_cast<double>(bands) * (band.value + band.error);
  const double scale_in = 2.0 / delta;
  const double top = std::ldexp(1.0, -static_cast<int>(bands));  // 2^{-n}
  out.h = [scale_in, top](cplx z) -> cplx {
    const double a = std::abs(z) * scale_in;
    if (a <= 0.0) return 0.0;
    const double radial = smooth_bump(top * a) - smooth_bump(a);
    if (radial == 0.0) return 0.0;
    return std::conj(z) / z * radial;
  };
  return out;
}

BandlimitResult bandlimit_approx(const FunctionSpec& f, double d, const GridSpec& spec) {
  if (!(d > 0.0)) throw std::invalid_argument("bandlimit_approx: d must be positive");
  if (!is_pow2(spec.samples))
    throw std::invalid_argument("bandlimit_approx: samples per axis must be a power of two");
  const std::size_t n = spec.samples;
  const double w = spec.half_width;
  const double dx = 2.0 * w / static_cast<double>(n);
  const double kappa = kPi / w;

  std::vector<cplx> vals(n * n);
  for (std::size_t iy = 0; iy < n; ++iy) {
    const double py = -w + (static_cast<double>(iy) + 0.5) * dx;
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double px = -w + (static_cast<double>(ix) + 0.5) * dx;
      vals[iy * n + ix] = f(cplx(px, py));
    }
  }
  std::vector<cplx> spectrum = vals;
  fft2_inplace(spectrum, n, -1);

  const double rho0 = 1.0 / (2.0 * d);
  const double rho1 = 1.0 / d;
  double leak = 0.0;
  for (std::size_t iy = 0; iy < n; ++iy) {
    const long long kyp = static_cast<long long>((iy + n / 2) % n) - static_cast<long long>(n / 2);
    for (std::size_t ix = 0; ix < n; ++ix) {
      const long long kxp =
          static_cast<long long>((ix + n / 2) % n) - static_cast<long long>(n / 2);
      const double rho = kappa * std::hypot(static_cast<double>(kxp), static_cast<double>(kyp));
      double m;
      if (rho <= rho0) {
        m = 1.0;
      } else if (rho >= rho1) {
        m = 0.0;
      } else {
        const double t = (rho - rho0) / (rho1 - rho0);
        const double c = std::cos(0.5 * kPi * t);
        m = c * c;
      }
      if (m == 0.0) leak += std::norm(spectrum[iy * n + ix]);
      spectrum[iy * n + ix] *= m;
    }
  }
  (void)leak;  // the mask removes it exactly; re-measured below after roundtrip

  fft2_inplace(spectrum, n, +1);
  const double inv = 1.0 / static_cast<double>(n * n);
  for (auto& v : spectrum) v *= inv;

  BandlimitResult out{FunctionSpec::identity(), PlanarGrid{}, 0.0, 0.0};
  out.samples.origin = -w + 0.5 * dx;
  out.samples.step = dx;
  out.samples.n = n;
  out.samples.values = spectrum;

  double dev = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) dev = std::max(dev, std::abs(vals[i] - spectrum[i]));
  out.sup_deviation = dev;

  // masked spectrum has exact zeros beyond rho1; report the roundtrip residual
  std::vector<cplx> check = spectrum;
  fft2_inplace(check, n, -1);
  double outside = 0.0, total = 0.0;
  for (std::size_t iy = 0; iy < n; ++iy) {
    const long long kyp = static_cast<long long>((iy + n / 2) % n) - static_cast<long long>(n / 2);
    for (std::size_t ix = 0; ix < n; ++ix) {
      const long long kxp =
          static_cast<long long>((ix + n / 2) % n) - static_cast<long long>(n / 2);
      const double rho = kappa * std::hypot(static_cast<double>(kxp), static_cast<double>(kyp));
      const double e = std::norm(check[iy * n + ix]);
      total += e;
      if (rho > rho1 * (1.0 + 1e-12)) outside += e;
    }
  }
  out.spectral_leakage = total > 0.0 ? std::sqrt(outside / total) : 0.0;

  // bilinear interpolation handle over the sample grid
  auto grid = std::make_shared<PlanarGrid>(out.samples);
  auto handle = [grid](cplx z) -> cplx {
    const double fx = (z.real() - grid->origin) / grid->step;
    const double fy = (z.imag() - grid->origin) / grid->step;
    const double cx = std::clamp(fx, 0.0, static_cast<double>(grid->n - 1));
    const double cy = std::clamp(fy, 0.0, static_cast<double>(grid->n - 1));
    const std::size_t ix = std::min(static_cast<std::size_t>(cx), grid->n - 2);
    const std::size_t iy = std::min(static_cast<std::size_t>(cy), grid->n - 2);
    const double tx = cx - static_cast<double>(ix);
    const double ty = cy - static_cast<double>(iy);
    return (1 - tx) * (1 - ty) * grid->value(ix, iy) + tx * (1 - ty) * grid->value(ix + 1, iy) +
           (1 - tx) * ty * grid->value(ix, iy + 1) + tx * ty * grid->value(ix + 1, iy + 1);
  };
  out.f_d = FunctionSpec::gridded("bandlimited(" + f.name() + ")", handle);
  return out;
}

}  // namespace opmod::fourier
