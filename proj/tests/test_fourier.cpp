#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "opmod/fourier.hpp"
#include "oracles.hpp"

using namespace opmod;
using namespace opmod::fourier;

namespace {
constexpr double kPi = 3.141592653589793238462643383280;

// smaller grid than the CLI default keeps the suite quick; tolerances match
const GridSpec kSpec{48.0, 512};

double mixed_error_radial(const PlanarGrid& g, const std::function<cplx(cplx)>& exact,
                          double rmax) {
  double worst = 0.0;
  for (std::size_t iy = 0; iy < g.n; ++iy)
    for (std::size_t ix = 0; ix < g.n; ++ix) {
      const cplx zeta = g.node(ix, iy);
      const double az = std::abs(zeta);
      if (az > rmax || az < 1e-14) continue;
      const cplx e = exact(zeta);
      worst = std::max(worst, std::abs(g.value(ix, iy) - e) / (1.0 + std::abs(e)));
    }
  return worst;
}

}  // namespace

TEST_CASE("bessel_j basics and series oracle") {
  CHECK(bessel_j(0, 0.0) == 1.0);
  CHECK(bessel_j(1, 0.0) == 0.0);
  CHECK(std::abs(bessel_j(1, 1.0) - oracles::bessel_series(1, 1.0)) <= 1e-10);
  CHECK_THROWS_AS(bessel_j(1, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(bessel_j(3, 1.0), std::invalid_argument);
}

TEST_CASE("bessel_j against frozen high-precision values") {
  CHECK(std::abs(bessel_j(0, 0.5) - (0.938469807240812904)) <= 1e-12);
  CHECK(std::abs(bessel_j(0, 10.0) - (-0.245935764451348335)) <= 1e-12);
  CHECK(std::abs(bessel_j(0, 29.75) - (-0.113178096352735081)) <= 1e-12);
  CHECK(std::abs(bessel_j(1, 1.0) - (0.440050585744933516)) <= 1e-12);
  CHECK(std::abs(bessel_j(1, 3.5) - (0.137377527362327186)) <= 1e-12);
  CHECK(std::abs(bessel_j(1, 22.25) - (0.0825637909522960996)) <= 1e-12);
  CHECK(std::abs(bessel_j(2, 0.25) - (0.00777188928596267693)) <= 1e-12);
  CHECK(std::abs(bessel_j(2, 14.0) - (-0.152019882582059623)) <= 1e-12);
  CHECK(std::abs(bessel_j(2, 28.5) - (0.131743858250954322)) <= 1e-12);
}

TEST_CASE("inverse transform of the disc indicator") {
  FourierOptions opt;
  opt.kink_radii = {1.0};
  auto r = inverse_fourier_grid([](cplx z) -> cplx { return std::abs(z) <= 1.0 ? 1.0 : 0.0; },
                                kSpec, opt);
  const double err = mixed_error_radial(
      r.grid,
      [](cplx zeta) -> cplx { return bessel_j(1, std::abs(zeta)) / (2.0 * kPi * std::abs(zeta)); },
      10.0);
  CHECK(err <= 1e-3);
  // value at the origin equals area/(4 pi^2)
  const std::size_t c = r.grid.n / 2;
  CHECK(std::abs(r.grid.value(c, c) - cplx(1.0 / (4.0 * kPi), 0.0)) <= 1e-4);
}

TEST_CASE("inverse transform of Psi") {
  FourierOptions opt;
  opt.kink_radii = {1.0};
  opt.tail = RadialTail{1, 1.0, 1.0};
  auto r = inverse_fourier_grid([](cplx z) { return psi(z); }, kSpec, opt);
  const double err = mixed_error_radial(
      r.grid,
      [](cplx zeta) -> cplx {
        const double az = std::abs(zeta);
        return cplx(0.0, 1.0) * bessel_j(1, az) / (kPi * zeta * az);
      },
      10.0);
  CHECK(err <= 1e-3);
}

TEST_CASE("inverse transform of Psi squared and its decay") {
  FourierOptions opt;
  opt.kink_radii = {1.0};
  opt.tail = RadialTail{2, 2.0, 1.0};
  auto r = inverse_fourier_grid(
      [](cplx z) {
        const cplx p = psi(z);
        return p * p;
      },
      kSpec, opt);
  const double err = mixed_error_radial(
      r.grid,
      [](cplx zeta) -> cplx { return -2.0 * bessel_j(2, std::abs(zeta)) / (kPi * zeta * zeta); },
      10.0);
  CHECK(err <= 1e-3);

  // decay statistic sup |H| (1 + |xi|^{5/2}) is finite and refinement-stable
  auto statistic = [](const PlanarGrid& g, double rmax) {
    double s = 0.0;
    for (std::size_t iy = 0; iy < g.n; ++iy)
      for (std::size_t ix = 0; ix < g.n; ++ix) {
        const double az = std::abs(g.node(ix, iy));
        if (az > rmax) continue;
        s = std::max(s, std::abs(g.value(ix, iy)) * (1.0 + std::pow(az, 2.5)));
      }
    return s;
  };
  auto refined = inverse_fourier_grid(
      [](cplx z) {
        const cplx p = psi(z);
        return p * p;
      },
      GridSpec{kSpec.half_width, 2 * kSpec.samples}, opt);
  const double rcommon = kPi / kSpec.half_width * (kSpec.samples / 2.0);
  const double s1 = statistic(r.grid, rcommon);
  const double s2 = statistic(refined.grid, rcommon);
  CHECK(s1 > 0.0);
  CHECK(std::abs(s1 - s2) <= 0.1 * std::max(s1, s2));
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(inverse_fourier_grid([](cplx) -> cplx { return 0.0; }, GridSpec{8.0, 100}, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(l1hat_norm([](cplx) -> cplx { return 0.0; }, 1.5, kSpec, {}),
                  std::invalid_argument);
}

TEST_CASE("psi pointwise") {
  CHECK(psi(cplx(0.0, 0.5)) == cplx(0.0, -0.5));
  CHECK(psi(cplx(2.0, 0.0)) == cplx(0.5, 0.0));
  // |Psi| <= 1 everywhere and the branches agree on the circle
  for (double th : {0.1, 1.2, 3.0}) {
    const cplx on = std::polar(1.0, th);
    CHECK(std::abs(psi(on) - std::conj(on)) <= 1e-15);
    CHECK(std::abs(psi(1.0001 * on)) <= 1.0);
    CHECK(std::abs(psi(0.9999 * on)) <= 1.0);
  }
}

TEST_CASE("psi constant against the independent radial oracle") {
  const PsiConstant& pc = psi_constant();
  CHECK(pc.quadrature_error <= 1e-4);
  const double oracle = oracles::psi_constant_oracle();
  CHECK(std::abs(pc.c - oracle) <= 1e-4);
  // frozen from a 30-digit evaluation of the defining integral
  CHECK(std::abs(pc.c - 1.60788876487) <= 1e-4);
  CHECK(psi_l1hat_norm() == doctest::Approx(2.0 * pc.c));
}

TEST_CASE("l1hat_norm of a unit-mass transform") {
  // f = F g for the Gaussian density g(x) = e^{-|x|^2/2} / (2 pi): then
  // F^{-1} f = g >= 0 with integral 1, and f(zeta) = e^{-|zeta|^2/2}
  auto f = [](cplx z) -> cplx { return std::exp(-0.5 * std::norm(z)); };
  L1HatResult r = l1hat_norm(f, 4.0, GridSpec{16.0, 256}, {});
  CHECK(std::abs(r.value - 1.0) <= 1e-4 + r.error);
}

TEST_CASE("l1hat_norm of Psi squared is finite with exponent 5/2") {
  FourierOptions opt;
  opt.kink_radii = {1.0};
  opt.tail = RadialTail{2, 2.0, 1.0};
  L1HatResult r = l1hat_norm(
      [](cplx z) {
        const cplx p = psi(z);
        return p * p;
      },
      2.5, GridSpec{32.0, 512}, opt);
  CHECK(std::isfinite(r.value));
  CHECK(r.value > 0.0);
}

TEST_CASE("dyadic annulus function") {
  // powers of two: delta=2, r=2^n costs n bands
  for (std::size_t n : {2u, 4u, 6u}) {
    DyadicH h = dyadic_h(2.0, std::ldexp(1.0, static_cast<int>(n)));  // r = 2^n
    CHECK(h.bands == n);
    CHECK(h.bound == doctest::Approx(static_cast<double>(n) * (h.band_norm + h.band_norm_error)));
  }
  // the annulus identity h(z) z / conj(z) = 1 on delta <= |z| <= r
  DyadicH h = dyadic_h(0.5, 11.0);
  for (double rad : {0.5, 0.8, 1.7, 5.0, 11.0}) {
    for (double th : {0.0, 0.9, 2.7}) {
      const cplx z = std::polar(rad, th);
      CHECK(std::abs(h.h(z) * z / std::conj(z) - 1.0) <= 1e-10);
    }
  }
  CHECK(std::abs(h.h(0.0)) == 0.0);
  CHECK_THROWS_AS(dyadic_h(2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(dyadic_h(2.0, 2.0), std::invalid_argument);

  // bound growth under doubling r is exactly one extra band
  DyadicH h1 = dyadic_h(1.0, 8.0);
  DyadicH h2 = dyadic_h(1.0, 16.0);
  CHECK(h2.bands == h1.bands + 1);
}

TEST_CASE("radial symmetry of the transform of a radial function") {
  auto f = [](cplx z) -> cplx { return std::exp(-std::abs(z)); };
  auto r = inverse_fourier_grid(f, GridSpec{16.0, 128}, {});
  const std::size_t n = r.grid.n;
  for (std::size_t iy = 1; iy < n; ++iy)
    for (std::size_t ix = 1; ix < n; ++ix) {
      const std::size_t jx = n - ix, jy = n - iy;
      // reflections through the origin land on grid nodes
      CHECK(std::abs(r.grid.value(ix, iy) - r.grid.value(jx, jy)) <= 1e-8);
    }
  // transpose symmetry (x <-> y)
  for (std::size_t iy = 0; iy < n; iy += 7)
    for (std::size_t ix = 0; ix < n; ix += 5)
      CHECK(std::abs(r.grid.value(ix, iy) - r.grid.value(iy, ix)) <= 1e-8);
}

TEST_CASE("bandlimit_approx reproduces constants and aligned atoms") {
  const GridSpec spec{16.0, 256};
  BandlimitResult c = bandlimit_approx(FunctionSpec::constant(cplx(0.3, -0.8)), 0.5, spec);
  CHECK(c.sup_deviation <= 1e-12);
  CHECK(c.spectral_leakage <= 1e-8);

  // grid-aligned atom inside the untouched inner disc passes through exactly
  const double kappa = kPi / spec.half_width;
  const cplx zeta0(4.0 * kappa, -3.0 * kappa);  // |zeta0| < 1/(2d) for d = 0.5
  BandlimitResult a = bandlimit_approx(FunctionSpec::exp_atom(zeta0), 0.5, spec);
  CHECK(a.sup_deviation <= 1e-8);
  CHECK(a.spectral_leakage <= 1e-8);
}

TEST_CASE("bandlimit_approx tracks |Re z| across scales") {
  const GridSpec spec{16.0, 256};
  // f(z) = |Re z| via the table registry entry on the window
  FunctionSpec f = FunctionSpec::table({-16.0, 0.0, 16.0}, {16.0, 0.0, 16.0});
  double prev_ratio = 0.0;
  for (double d : {1.0, 0.5, 0.25}) {
    BandlimitResult r = bandlimit_approx(f, d, spec);
    const double omega_d = d;  // scalar modulus of |Re z| is t
    const double ratio = r.sup_deviation / omega_d;
    CHECK(std::isfinite(ratio));
    CHECK(ratio <= 6.0);  // measured constant stays small across scales
    prev_ratio = std::max(prev_ratio, ratio);
  }
  CHECK(prev_ratio > 0.0);
}
