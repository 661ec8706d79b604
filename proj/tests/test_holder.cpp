#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "opmod/holder.hpp"
#include "opmod/rng.hpp"

using namespace opmod;
using namespace opmod::holder;

TEST_CASE("hn evaluation") {
  const cplx z(0.6, -1.1);
  CHECK(hn_eval(0, z) == z);
  CHECK(std::abs(hn_eval(-1, z) - std::conj(z)) <= 1e-15);
  CHECK(hn_eval(2, cplx(0, 0)) == cplx(0, 0));
  // h_n on the circle winds 2n+1 times
  const double t = 0.37;
  CHECK(std::abs(hn_eval(1, std::polar(1.0, t)) - std::polar(1.0, 3.0 * t)) <= 1e-15);
  // conj(h_n) = h_{-n-1}
  for (int n : {-3, -1, 0, 2}) {
    CHECK(std::abs(std::conj(hn_eval(n, z)) - hn_eval(-n - 1, z)) <= 1e-14);
  }
}

TEST_CASE("hn lipschitz report") {
  HnReport r0 = hn_lipschitz_check(0, 40, 8, 3);
  CHECK(r0.ratio_violations == 0);
  CHECK(r0.max_operator_ratio == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r0.scalar_circle_ratio == doctest::Approx(1.0).epsilon(1e-6));

  HnReport r1 = hn_lipschitz_check(1, 60, 10, 5);
  CHECK(r1.ratio_violations == 0);
  CHECK(r1.max_operator_ratio <= 3.0 + 1e-8);
  CHECK(r1.max_telescoping_residual <= 1e-9);
  CHECK(r1.scalar_circle_ratio >= 3.0 - 1e-3);

  HnReport r2 = hn_lipschitz_check(2, 40, 8, 7);
  CHECK(r2.scalar_circle_ratio >= 5.0 - 1e-3);
  CHECK(r2.scalar_circle_ratio <= 5.0 + 1e-6);

  // telescoping across signs and sizes
  for (int n : {-4, -2, 3, 4}) {
    HnReport r = hn_lipschitz_check(n, 20, 16, 11);
    CHECK(r.ratio_violations == 0);
    CHECK(r.max_telescoping_residual <= 1e-9);
  }
}

TEST_CASE("holder ratio search basics") {
  CHECK_THROWS_AS(holder_ratio_search(FunctionSpec::constant(2.0), 0.5, 4, 10, 1),
                  std::invalid_argument);
  // |z|^alpha along a ray: the scalar quotient 1 is attained
  HolderConstantEstimate est = holder_ratio_search(FunctionSpec::abs_power(0.5), 0.5, 3, 40, 3);
  CHECK(est.lower >= 1.0 - 1e-6);
  CHECK(est.seminorm_method == "analytic");
  CHECK(est.holder_seminorm == doctest::Approx(1.0));
  // identity: raw ratio is ||N1-N2||^{1-alpha}, capped by the radius
  HolderConstantEstimate id = holder_ratio_search(FunctionSpec::identity(), 0.5, 3, 60, 5, 1.0);
  CHECK(id.raw_ratio <= std::pow(2.0, 0.5) + 1e-6);
  CHECK(id.raw_ratio >= 1.0);
}

TEST_CASE("sampled holder seminorm never decreases with the budget") {
  const FunctionSpec f = FunctionSpec::hn(1);
  double prev = 0.0;
  for (std::size_t pairs : {500u, 5000u, 50000u}) {
    const double s = f.sampled_holder(0.7, 1.0, pairs, 9);
    CHECK(s >= prev - 1e-15);
    prev = s;
  }
}

TEST_CASE("quasicommutator experiment") {
  // R = I on a commuting pair: both sides vanish
  QuasicommutatorReport rep = quasicommutator_experiment(FunctionSpec::conjugate(), 0.7, 50, 5, 7);
  CHECK(rep.violations == 0);
  CHECK(rep.used > 0);
  CHECK(std::isfinite(rep.max_ratio));
  CHECK(rep.max_ratio > 0.0);
  CHECK(std::isfinite(rep.max_omega_ratio));

  // f = conj, R = I: the recorded raw ratio equals ||N1-N2||^{1-alpha} exactly
  Rng rng(17);
  const double alpha = 0.6;
  for (int t = 0; t < 5; ++t) {
    Rng sub = rng.substream(t);
    std::vector<cplx> e1(4), e2(4);
    for (auto& e : e1) e = sub.disc_point(1.0);
    for (auto& e : e2) e = sub.disc_point(1.0);
    NormalOperator n1(e1, haar_unitary(4, sub));
    NormalOperator n2(e2, haar_unitary(4, sub));
    const ComplexMatrix i4 = ComplexMatrix::identity(4);
    const double dn = operator_norm(n1.materialize() - n2.materialize());
    const double num = operator_norm(multiply(n1.apply(FunctionSpec::conjugate()), i4) -
                                     multiply(i4, n2.apply(FunctionSpec::conjugate())));
    CHECK(num == doctest::Approx(dn).epsilon(1e-10));
    CHECK(num / std::pow(dn, alpha) ==
          doctest::Approx(std::pow(dn, 1.0 - alpha)).epsilon(1e-10));
  }
}

TEST_CASE("alpha grid report is finite and recorded per alpha") {
  for (double a : {0.5, 0.7, 0.9}) {
    QuasicommutatorReport rep = quasicommutator_experiment(FunctionSpec::hn(1), a, 30, 5, 23);
    CHECK(rep.used > 0);
    CHECK(std::isfinite(rep.max_ratio));
    CHECK(rep.mean_ratio <= rep.max_ratio + 1e-12);
  }
}

TEST_CASE("halpha substitution machinery") {
  CHECK(halpha_delta(0.5) == doctest::Approx(2.0 * std::exp(-2.0)));
  // envelope of the identity function: values equal delta
  std::vector<moduli::WitnessSample> samples;
  for (int i = 0; i < 40; ++i) {
    const double d = 1e-5 * std::pow(1.6, i);
    samples.push_back({d, d, "scalar"});
  }
  std::vector<double> grid;
  for (int i = 0; i < 40; ++i) grid.push_back(1e-5 * std::pow(1.6, i));
  moduli::ModulusEnvelope env = moduli::build_envelope(moduli::ModulusKind::PLAIN, samples, grid);
  // bounded-by-one hypothesis holds for abs_power on the unit disc; use the
  // envelope with f = |z| (Lipschitz 1, sup 1)
  FunctionSpec f = FunctionSpec::abs_power(1.0);
  auto ests = halpha_lower({0.3, 0.5, 0.7}, f, env, 1.0);
  REQUIRE(ests.size() == 3);
  for (const auto& e : ests) {
    CHECK(std::isfinite(e.lower));
    CHECK(e.lower > 0.0);
    CHECK(e.holder_seminorm == doctest::Approx(std::pow(2.0, 1.0 - e.alpha)));
  }
  // sup > 1 violates the hypothesis
  CHECK_THROWS_AS(halpha_lower({0.5}, FunctionSpec::constant(2.0), env, 1.0),
                  std::invalid_argument);
  // the Lambda_alpha interpolation bound 2^{1-alpha} is honored by samples
  for (double a : {0.3, 0.6, 0.9})
    CHECK(f.sampled_holder(a, 1.0, 20000, 3) <= std::pow(2.0, 1.0 - a) + 1e-9);
}
