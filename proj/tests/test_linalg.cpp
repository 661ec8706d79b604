#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "opmod/function_spec.hpp"
#include "opmod/linalg.hpp"
#include "opmod/rng.hpp"
#include "oracles.hpp"

using namespace opmod;

namespace {

ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.complex_normal();
  return m;
}

NormalOperator random_normal_op(std::size_t dim, double radius, Rng& rng) {
  std::vector<cplx> eigs(dim);
  for (auto& e : eigs) e = rng.disc_point(radius);
  return NormalOperator(std::move(eigs), haar_unitary(dim, rng));
}

}  // namespace

TEST_CASE("operator_norm on normal and nilpotent examples") {
  ComplexMatrix d = ComplexMatrix::diagonal({cplx(3.0, 0.0), cplx(0.0, 4.0)});
  CHECK(operator_norm(d) == doctest::Approx(4.0).epsilon(1e-12));

  ComplexMatrix n(2, 2);
  n(0, 1) = 1.0;
  CHECK(operator_norm(n) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(operator_norm(ComplexMatrix{}), std::invalid_argument);
}

TEST_CASE("operator_norm matches the one-sided Jacobi oracle") {
  Rng rng(7);
  ComplexMatrix m = random_matrix(8, 8, rng);
  const double lib = operator_norm(m);
  const double oracle = oracles::onesided_jacobi_sigma_max(m);
  CHECK(std::abs(lib - oracle) <= 1e-9 * (1.0 + oracle));

  // a matrix engineered so the all-ones start is an exact non-top eigenvector
  ComplexMatrix trap(2, 2);
  trap(0, 0) = 2.0;
  trap(0, 1) = -1.0;
  trap(1, 0) = -1.0;
  trap(1, 1) = 2.0;
  CHECK(operator_norm(trap) == doctest::Approx(3.0).epsilon(1e-11));
}

TEST_CASE("operator_norm is unitarily invariant") {
  Rng rng(11);
  ComplexMatrix m = random_matrix(6, 6, rng);
  ComplexMatrix u = haar_unitary(6, rng);
  ComplexMatrix v = haar_unitary(6, rng);
  const double a = operator_norm(m);
  const double b = operator_norm(multiply(u, multiply(m, v)));
  CHECK(std::abs(a - b) <= 1e-9 * (1.0 + a));
}

TEST_CASE("make_normal basics") {
  NormalOperator d({cplx(1.0, 0.0), cplx(0.0, 1.0)}, ComplexMatrix::identity(2));
  ComplexMatrix m = d.materialize();
  CHECK(m(0, 0) == cplx(1.0, 0.0));
  CHECK(m(1, 1) == cplx(0.0, 1.0));
  CHECK(std::abs(m(0, 1)) == 0.0);

  // scalar spectrum: identity regardless of the conjugator
  Rng rng(3);
  ComplexMatrix u = haar_unitary(4, rng);
  NormalOperator scalar({1.0, 1.0, 1.0, 1.0}, u);
  CHECK(operator_norm(scalar.materialize() - ComplexMatrix::identity(4)) <= 1e-12);

  // non-unitary conjugator rejected with the defect in the message
  ComplexMatrix bad = ComplexMatrix::identity(2);
  bad(0, 0) = 2.0;
  CHECK_THROWS_AS(NormalOperator({1.0, 2.0}, bad), validation_error);
}

TEST_CASE("Haar-like unitary with unit-circle spectrum passes normality") {
  Rng rng(17);
  std::vector<cplx> eigs(6);
  for (std::size_t i = 0; i < eigs.size(); ++i) eigs[i] = std::polar(1.0, rng.uniform(0.0, 6.28));
  NormalOperator n(eigs, haar_unitary(6, rng));
  ComplexMatrix m = n.materialize();
  ComplexMatrix comm = multiply(m, adjoint(m)) - multiply(adjoint(m), m);
  const double nm = operator_norm(m);
  CHECK(operator_norm(comm) <= 1e-9 * nm * nm);
}

TEST_CASE("apply_function on spectral data") {
  NormalOperator d({cplx(1.0, 1.0), cplx(2.0, 0.0)}, ComplexMatrix::identity(2));
  ComplexMatrix sq = apply_function(FunctionSpec::power(2), d);
  CHECK(sq(0, 0) == cplx(0.0, 2.0));
  CHECK(sq(1, 1) == cplx(4.0, 0.0));

  Rng rng(5);
  NormalOperator n = random_normal_op(5, 2.0, rng);
  CHECK(operator_norm(apply_function(FunctionSpec::identity(), n) - n.materialize()) <= 1e-12);
  CHECK(operator_norm(apply_function(FunctionSpec::conjugate(), n) -
                      adjoint(n.materialize())) <= 1e-12);
}

TEST_CASE("functional calculus is multiplicative and adjoint-compatible") {
  Rng rng(23);
  NormalOperator n = random_normal_op(6, 1.5, rng);
  const FunctionSpec f = FunctionSpec::hn(1);
  const FunctionSpec g = FunctionSpec::power(2);
  ComplexMatrix lhs = apply_function(f.product(g), n);
  ComplexMatrix rhs = multiply(apply_function(f, n), apply_function(g, n));
  CHECK(operator_norm(lhs - rhs) <= 1e-9 * (1.0 + operator_norm(rhs)));

  ComplexMatrix a1 = apply_function(f.conj(), n);
  ComplexMatrix a2 = adjoint(apply_function(f, n));
  CHECK(operator_norm(a1 - a2) <= 1e-12 * (1.0 + operator_norm(a2)));
}

TEST_CASE("corner lift carries the quasicommutator exactly") {
  Rng rng(31);
  NormalOperator n1 = random_normal_op(4, 1.0, rng);
  NormalOperator n2 = random_normal_op(4, 1.0, rng);
  ComplexMatrix r = random_matrix(4, 4, rng);
  const FunctionSpec f = FunctionSpec::hn(1);

  NormalOperator nn = block_diag(n1, n2);
  ComplexMatrix rr = corner_embed(r);
  ComplexMatrix lifted = multiply(nn.apply(f), rr) - multiply(rr, nn.apply(f));
  ComplexMatrix direct = multiply(n1.apply(f), r) - multiply(r, n2.apply(f));
  CHECK(operator_norm(lifted) == doctest::Approx(operator_norm(direct)).epsilon(1e-12));
}

TEST_CASE("swap lift carries the difference exactly") {
  Rng rng(37);
  NormalOperator n1 = random_normal_op(3, 1.0, rng);
  NormalOperator n2 = random_normal_op(3, 1.0, rng);
  const FunctionSpec f = FunctionSpec::power(2);
  NormalOperator nn = block_diag(n1, n2);
  ComplexMatrix q = swap_lift(3);
  const double lifted = operator_norm(multiply(nn.apply(f), q) - multiply(q, nn.apply(f)));
  const double direct = operator_norm(n1.apply(f) - n2.apply(f));
  CHECK(lifted == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("unitary dilation is unitary and rejects large blocks") {
  Rng rng(41);
  ComplexMatrix a = random_hermitian(5, rng);
  a *= cplx(1.0 / operator_norm(a), 0.0);
  ComplexMatrix u = unitary_dilation(a, 0.5);
  CHECK(membership_defect(u, OperatorClass::U) <= 1e-10 * (1.0 + operator_norm(u)));
  ComplexMatrix exact = ComplexMatrix::diagonal({cplx(1.0, 0.0), cplx(-0.5, 0.0)});
  CHECK_THROWS_AS(unitary_dilation(exact, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(unitary_dilation(exact, 2.0), std::invalid_argument);
}

TEST_CASE("block diagonal lift preserves the spectra as multisets") {
  Rng rng(43);
  NormalOperator n1 = random_normal_op(3, 1.0, rng);
  NormalOperator n2 = random_normal_op(4, 1.0, rng);
  NormalOperator nn = block_diag(n1, n2);
  REQUIRE(nn.dim() == 7);
  std::vector<cplx> expected = n1.eigenvalues();
  expected.insert(expected.end(), n2.eigenvalues().begin(), n2.eigenvalues().end());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(nn.eigenvalues()[i] == expected[i]);
}

TEST_CASE("square-root commutator inequality on random contractions") {
  Rng rng(47);
  for (int t = 0; t < 25; ++t) {
    Rng sub = rng.substream(t);
    const std::size_t d = 2 + sub.index(5);
    ComplexMatrix tm = random_hermitian(d, sub);
    tm *= cplx(0.9 * sub.uniform(0.2, 1.0) / operator_norm(tm), 0.0);
    ComplexMatrix x = random_matrix(d, d, sub);
    ComplexMatrix s = sqrt_psd(ComplexMatrix::identity(d) - multiply(tm, tm));
    const double lhs = operator_norm(multiply(s, x) - multiply(x, s));
    const double nt = operator_norm(tm);
    const double rhs =
        nt * operator_norm(multiply(x, tm) - multiply(tm, x)) / std::sqrt(1.0 - nt * nt);
    CHECK(lhs <= rhs + 1e-8);
  }
}

TEST_CASE("operator class membership predicates") {
  Rng rng(53);
  ComplexMatrix h = random_hermitian(4, rng);
  CHECK(is_member(h, OperatorClass::SA));
  CHECK(!is_member(h + cplx(0.0, 0.1) * ComplexMatrix::identity(4), OperatorClass::SA));
  ComplexMatrix u = haar_unitary(4, rng);
  CHECK(is_member(u, OperatorClass::U));
  CHECK(is_member(u, OperatorClass::CONTRACTION));
  ComplexMatrix p(3, 3);
  p(0, 0) = 1.0;
  p(2, 2) = 1.0;
  CHECK(is_member(p, OperatorClass::P));
  CHECK(is_member(cplx(2.0, 0.0) * p, OperatorClass::P) == false);
}

TEST_CASE("parallel and serial multiply agree bitwise") {
  Rng rng(59);
  ComplexMatrix a = random_matrix(37, 41, rng);
  ComplexMatrix b = random_matrix(41, 29, rng);
  ComplexMatrix c1 = multiply(a, b);
  ComplexMatrix c2 = multiply_serial(a, b);
  for (std::size_t i = 0; i < c1.size(); ++i) CHECK(c1.data()[i] == c2.data()[i]);
}
