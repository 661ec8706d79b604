#ifndef OPMOD_FOURIER_HPP
#define OPMOD_FOURIER_HPP

//
// Module      : fourier
// Description : planar inverse Fourier transforms on grids, Bessel functions,
//               L1-of-transform norms, the Psi kernel and dyadic annulus
//               functions, band-limited approximation
//
// Convention: (F^{-1} f)(zeta) = (1/4pi^2) Integral f(xi) e^{i Re(xi conj(zeta))} dm2(xi).
//

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "opmod/complex_matrix.hpp"
#include "opmod/function_spec.hpp"

namespace opmod::fourier {

// J_nu for nu in {0,1,2}; x must be >= 0
double bessel_j(int order, double x);

struct GridSpec {
  double half_width = 64.0;     // input window [-W, W]^2
  std::size_t samples = 1024;   // per axis, power of two
};

// Values on an N x N lattice of nodes at origin + step * index (same on both
// axes); row-major with x fastest.
struct PlanarGrid {
  double origin = 0.0;
  double step = 0.0;
  std::size_t n = 0;
  std::vector<cplx> values;

  cplx node(std::size_t ix, std::size_t iy) const {
    return {origin + step * static_cast<double>(ix), origin + step * static_cast<double>(iy)};
  }
  const cplx& value(std::size_t ix, std::size_t iy) const { return values[iy * n + ix]; }
  cplx& value(std::size_t ix, std::size_t iy) { return values[iy * n + ix]; }
};

// Exact tail of the integrand beyond the window: coeff * e^{-i k theta} / r^p
// for r >= inner radius; the supported (harmonic, power) pairs (1,1) and
// (2,2) have closed-form Hankel tails.
struct RadialTail {
  int harmonic = 1;
  double power = 1.0;
  cplx coeff{1.0, 0.0};
};

struct FourierOptions {
  std::vector<double> kink_radii;    // circles where f is not smooth
  std::optional<RadialTail> tail;    // analytic continuation beyond the window
  int supersample = 4;               // s x s cell averaging
  int kink_supersample = 32;         // finer averaging near kinks / window edge
};

struct InverseFourierResult {
  PlanarGrid grid;          // output nodes zeta = k * (pi/W), k in [-N/2, N/2)
  double error_estimate;    // heuristic alias + quadrature estimate
};

InverseFourierResult inverse_fourier_grid(const std::function<cplx(cplx)>& f,
                                          const GridSpec& spec,
                                          const FourierOptions& opt = {});

struct L1HatResult {
  double value = 0.0;
  double error = 0.0;
  double measured_tail_constant = 0.0;
};

// || F^{-1} f ||_{L^1} by grid quadrature with a decay-based tail bound.
// Requires decay exponent p > 2; the tail constant is measured on the outer
// part of the computed grid and reported.
L1HatResult l1hat_norm(const std::function<cplx(cplx)>& f, double radial_decay_exponent,
                       const GridSpec& spec = {}, const FourierOptions& opt = {});

// Psi(z) = conj(z) inside the open unit disc, 1/z outside
cplx psi(cplx z);

struct PsiConstant {
  double c = 0.0;                // (1/2) ||Psi||_{L1-hat}
  double quadrature_error = 0.0;
};

// cached; c = Integral_0^inf |J_1(r)|/r dr via inter-zero quadrature plus an
// asymptotic tail
const PsiConstant& psi_constant();

// ||Psi||_{L1-hat} = 2 * psi_constant().c
double psi_l1hat_norm();

struct DyadicH {
  std::function<cplx(cplx)> h;   // h(0) = 0, h = conj(z)/z on delta <= |z| <= r
  std::size_t bands = 0;         // dyadic band count n
  double bound = 0.0;            // n * ||psi_band||_{L1-hat} (plus quadrature error)
  double band_norm = 0.0;        // ||psi_band||_{L1-hat}
  double band_norm_error = 0.0;
};

DyadicH dyadic_h(double delta, double r);

// the smooth even cutoff used by dyadic_h: 1 on [-1,1], support [-2,2]
double smooth_bump(double x);

// cached L1-hat norm of one dyadic band psi(z) = (conj z / z)(bump(|z|/2) - bump(|z|))
const L1HatResult& psi_band_l1hat();

struct BandlimitResult {
  FunctionSpec f_d;          // grid-backed handle (bilinear interpolation)
  PlanarGrid samples;        // f_d on the spatial grid
  double spectral_leakage;   // transform mass outside the 1/d disc after masking
  double sup_deviation;      // max |f - f_d| on the grid
};

// Convolution with a de-la-Vallee-Poussin-type kernel: transform multiplier 1
// on |zeta| <= 1/(2d), smooth rolloff, 0 beyond 1/d.
BandlimitResult bandlimit_approx(const FunctionSpec& f, double d,
                                 const GridSpec& spec = {16.0, 512});

}  // namespace opmod::fourier

#endif
