#include "opmod/schur.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "opmod/rng.hpp"

namespace opmod::schur {

namespace {

double entry_tol(const ComplexMatrix& phi) { return 1e-10 * (1.0 + phi.max_abs()); }

// Hermitian positive-definite solve (Cholesky with a tiny ridge), used by the
// alternating least-squares sweeps. a is d x d, rhs m x d row-major; solves
// out * a = rhs  (i.e. per-row solves with the Gram matrix on the right).
ComplexMatrix solve_gram(const ComplexMatrix& a, const ComplexMatrix& rhs) {
  const std::size_t d = a.rows();
  ComplexMatrix l = a;
  double tr = 0.0;
  for (std::size_t i = 0; i < d; ++i) tr += l(i, i).real();
  const double ridge = 1e-14 * (tr / std::max<std::size_t>(1, d)) + 1e-300;
  for (std::size_t i = 0; i < d; ++i) l(i, i) += ridge;
  // in-place lower Cholesky
  for (std::size_t j = 0; j < d; ++j) {
    double s = l(j, j).real();
    for (std::size_t k = 0; k < j; ++k) s -= std::norm(l(j, k));
    s = std::max(s, 1e-300);
    const double ljj = std::sqrt(s);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < d; ++i) {
      cplx v = l(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * std::conj(l(j, k));
      l(i, j) = v / ljj;
    }
  }
  // solve x (L L*) = rhs row-wise: first w L* = rhs, then x L = w
  ComplexMatrix out = rhs;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    cplx* row = out.data() + r * d;
    // w L* = rhs  => forward in j with conj(L)
    for (std::size_t j = 0; j < d; ++j) {
      cplx v = row[j];
      for (std::size_t k = 0; k < j; ++k) v -= row[k] * std::conj(l(j, k));
      row[j] = v / l(j, j).real();
    }
    // x L = w  => backward
    for (std::size_t jj = d; jj-- > 0;) {
      cplx v = row[jj];
      for (std::size_t k = jj + 1; k < d; ++k) v -= row[k] * l(k, jj);
      row[jj] = v / l(jj, jj).real();
    }
  }
  return out;
}

}  // namespace

ComplexMatrix schur_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("schur_product: shape mismatch");
  ComplexMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] * b.data()[i];
  return c;
}

double Factorization::max_row_norm_x() const {
  double m = 0.0;
  for (std::size_t j = 0; j < x.rows(); ++j) {
    double s = 0.0;
    for (std::size_t w = 0; w < x.cols(); ++w) s += std::norm(x(j, w));
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

double Factorization::max_row_norm_y() const {
  double m = 0.0;
  for (std::size_t k = 0; k < y.rows(); ++k) {
    double s = 0.0;
    for (std::size_t w = 0; w < y.cols(); ++w) s += std::norm(y(k, w));
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

double Factorization::value() const { return max_row_norm_x() * max_row_norm_y(); }

double Factorization::residual(const ComplexMatrix& phi) const {
  ComplexMatrix prod = multiply(x, adjoint(y));
  prod -= phi;
  return prod.max_abs();
}

void Factorization::rebalance() {
  const double mx = max_row_norm_x();
  const double my = max_row_norm_y();
  if (mx <= 0.0 || my <= 0.0) return;
  const double t = std::sqrt(my / mx);
  x *= cplx(t, 0.0);
  y *= cplx(1.0 / t, 0.0);
}

// ---------------------------------------------------------------------------
// lower bound
// ---------------------------------------------------------------------------

namespace {

struct LowerCandidate {
  double value = -1.0;
  ComplexMatrix b;
};

// normalize to operator norm one, evaluate
LowerCandidate eval_candidate(const ComplexMatrix& phi, ComplexMatrix b) {
  const double nb = operator_norm(b);
  if (!(nb > 0.0) || !b.all_finite()) return {};
  b *= cplx(1.0 / nb, 0.0);
  return {operator_norm(schur_product(phi, b)), std::move(b)};
}

// one alternating singular-vector ascent step; monotone in theory
ComplexMatrix ascent_step(const ComplexMatrix& phi, const ComplexMatrix& b) {
  const ComplexMatrix c = schur_product(phi, b);
  // top singular pair of c via the dense SVD
  Svd sc = svd_jacobi(c);
  if (sc.sigma.empty() || sc.sigma[0] <= 0.0 || sc.u.cols() == 0) return b;
  std::vector<cplx> u(c.rows()), v(c.cols());
  for (std::size_t i = 0; i < c.rows(); ++i) u[i] = sc.u(i, 0);
  for (std::size_t i = 0; i < c.cols(); ++i) v[i] = sc.v(i, 0);
  // linearized objective: maximize Re tr((conj g)* b) over ||b|| <= 1
  ComplexMatrix g(phi.rows(), phi.cols());
  for (std::size_t j = 0; j < phi.rows(); ++j)
    for (std::size_t k = 0; k < phi.cols(); ++k)
      g(j, k) = std::conj(phi(j, k) * std::conj(u[j]) * v[k]);
  Svd sg = svd_jacobi(g);
  const std::size_t rank = sg.u.cols();
  if (rank == 0) return b;
  ComplexMatrix vr(g.cols(), rank);
  for (std::size_t i = 0; i < g.cols(); ++i)
    for (std::size_t j = 0; j < rank; ++j) vr(i, j) = sg.v(i, j);
  return multiply(sg.u, adjoint(vr));  // partial isometry, norm <= 1
}

}  // namespace

MultiplierEstimate multiplier_lower(const ComplexMatrix& phi, std::size_t budget,
                                    std::uint64_t seed,
                                    const std::vector<ComplexMatrix>& candidates) {
  if (phi.empty()) throw std::invalid_argument("multiplier_lower: empty matrix");
  if (budget < 1) throw std::invalid_argument("multiplier_lower: budget must be >= 1");

  LowerCandidate best;

  auto consider = [&best, &phi](ComplexMatrix b) {
    LowerCandidate c = eval_candidate(phi, std::move(b));
    if (c.value > best.value) best = std::move(c);
  };

  // max-entry candidate: lower >= max |phi_jk|
  {
    std::size_t bj = 0, bk = 0;
    double m = -1.0;
    for (std::size_t j = 0; j < phi.rows(); ++j)
      for (std::size_t k = 0; k < phi.cols(); ++k)
        if (std::abs(phi(j, k)) > m) {
          m = std::abs(phi(j, k));
          bj = j;
          bk = k;
        }
    ComplexMatrix e(phi.rows(), phi.cols());
    e(bj, bk) = 1.0;
    consider(std::move(e));
  }
  for (const auto& c : candidates)
    if (c.rows() == phi.rows() && c.cols() == phi.cols()) consider(c);

  const std::size_t random_budget = std::max<std::size_t>(1, (budget * 6) / 10);
  const std::size_t ascent_budget = budget - std::min(budget, random_budget);

  Rng rng(seed);
  for (std::size_t t = 0; t < random_budget; ++t) {
    Rng sub = rng.substream(t);
    ComplexMatrix b(phi.rows(), phi.cols());
    for (std::size_t i = 0; i < b.size(); ++i) b.data()[i] = sub.complex_normal();
    consider(std::move(b));
  }
  for (std::size_t t = 0; t < ascent_budget; ++t) {
    if (!best.b.all_finite() || best.b.empty()) break;
    LowerCandidate next = eval_candidate(phi, ascent_step(phi, best.b));
    if (next.value <= best.value * (1.0 + 1e-13)) {
      if (next.value > best.value) best = std::move(next);
      break;  // ascent stalled
    }
    best = std::move(next);
  }

  MultiplierEstimate est;
  est.lower = std::max(0.0, best.value);
  est.lower_certificate = std::move(best.b);
  return est;
}

// ---------------------------------------------------------------------------
// upper bound
// ---------------------------------------------------------------------------

namespace {

// 0/1 pattern as a union of disjoint complete blocks G_i x H_i; empty optional
// when phi is not such a pattern.
std::optional<Factorization> block_indicator_certificate(const ComplexMatrix& phi) {
  const std::size_t m = phi.rows(), n = phi.cols();
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const cplx v = phi.data()[i];
    if (std::abs(v) > 1e-12 && std::abs(v - 1.0) > 1e-12) return std::nullopt;
  }
  // union-find over rows and columns joined by nonzero entries
  std::vector<int> parent(m + n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  bool any = false;
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < n; ++k)
      if (std::abs(phi(j, k) - 1.0) <= 1e-12) {
        any = true;
        parent[find(static_cast<int>(j))] = find(static_cast<int>(m + k));
      }
  if (!any) {
    // zero matrix: the empty factorization of value 0
    Factorization f{ComplexMatrix::zero(m, 1), ComplexMatrix::zero(n, 1)};
    return f;
  }
  std::vector<bool> row_has_one(m, false), col_has_one(n, false);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < n; ++k)
      if (std::abs(phi(j, k) - 1.0) <= 1e-12) {
        row_has_one[j] = true;
        col_has_one[k] = true;
      }
  // completeness: a joined (row, col) pair with a zero entry breaks the
  // disjoint product structure
  for (std::size_t j = 0; j < m; ++j) {
    if (!row_has_one[j]) continue;
    for (std::size_t k = 0; k < n; ++k) {
      if (!col_has_one[k]) continue;
      if (find(static_cast<int>(j)) == find(static_cast<int>(m + k)) &&
          std::abs(phi(j, k) - 1.0) > 1e-12)
        return std::nullopt;
    }
  }
  std::vector<int> comp_of(m + n, -1);
  int ncomp = 0;
  for (std::size_t a = 0; a < m + n; ++a) {
    const int root = find(static_cast<int>(a));
    if (comp_of[root] < 0) comp_of[root] = ncomp++;
  }
  Factorization f{ComplexMatrix::zero(m, static_cast<std::size_t>(ncomp)),
                  ComplexMatrix::zero(n, static_cast<std::size_t>(ncomp))};
  for (std::size_t j = 0; j < m; ++j)
    if (row_has_one[j])
      f.x(j, static_cast<std::size_t>(comp_of[find(static_cast<int>(j))])) = 1.0;
  for (std::size_t k = 0; k < n; ++k)
    if (col_has_one[k])
      f.y(k, static_cast<std::size_t>(comp_of[find(static_cast<int>(m + k))])) = 1.0;
  if (f.residual(phi) > entry_tol(phi)) return std::nullopt;
  return f;
}

Factorization ones_certificate(std::size_t m, std::size_t n) {
  Factorization f{ComplexMatrix(m, 1), ComplexMatrix(n, 1)};
  for (std::size_t j = 0; j < m; ++j) f.x(j, 0) = 1.0;
  for (std::size_t k = 0; k < n; ++k) f.y(k, 0) = 1.0;
  return f;
}

struct AlsResult {
  double value = std::numeric_limits<double>::infinity();
  std::optional<Factorization> fact;
};

void als_improve(const ComplexMatrix& phi, Factorization f, std::size_t sweeps,
                 AlsResult& best) {
  const double tol = entry_tol(phi);
  auto keep_if_better = [&](const Factorization& cand) {
    const double v = cand.value();
    if (v < best.value && cand.residual(phi) <= tol) {
      best.value = v;
      best.fact = cand;
    }
  };
  f.rebalance();
  keep_if_better(f);
  for (std::size_t it = 0; it < sweeps; ++it) {
    // x-step: minimum-norm rows with y fixed
    ComplexMatrix gy = multiply(adjoint(f.y), f.y);
    ComplexMatrix xr = solve_gram(gy, multiply(phi, f.y));
    if (!xr.all_finite()) return;
    f.x = std::move(xr);
    // y-step
    ComplexMatrix gx = multiply(adjoint(f.x), f.x);
    ComplexMatrix yr = solve_gram(gx, multiply(adjoint(phi), f.x));
    if (!yr.all_finite()) return;
    f.y = std::move(yr);
    f.rebalance();
    const double before = best.value;
    keep_if_better(f);
    if (best.value > before * (1.0 - 1e-12) && it > 2 && best.value <= before) break;
  }
}

}  // namespace

MultiplierEstimate multiplier_upper(const ComplexMatrix& phi, std::size_t iterations,
                                    std::uint64_t seed) {
  if (phi.empty()) throw std::invalid_argument("multiplier_upper: empty matrix");
  if (iterations < 1) throw std::invalid_argument("multiplier_upper: iterations must be >= 1");
  const std::size_t m = phi.rows(), n = phi.cols();
  const double tol = entry_tol(phi);

  AlsResult best;

  // structural route: disjoint block pattern
  if (auto f = block_indicator_certificate(phi)) {
    const double v = f->value();
    if (v < best.value) {
      best.value = v;
      best.fact = std::move(*f);
    }
  }
  // structural route: complement of a block pattern (ones - pattern)
  {
    ComplexMatrix comp(m, n);
    bool zero_one = true;
    for (std::size_t i = 0; i < phi.size(); ++i) {
      const cplx v = phi.data()[i];
      if (std::abs(v) > 1e-12 && std::abs(v - 1.0) > 1e-12) {
        zero_one = false;
        break;
      }
      comp.data()[i] = 1.0 - v;
    }
    if (zero_one) {
      if (auto f = block_indicator_certificate(comp)) {
        Factorization ones = ones_certificate(m, n);
        ones.rebalance();
        f->rebalance();
        Factorization sum = stack(std::move(ones), scale(std::move(*f), -1.0));
        if (sum.residual(phi) <= tol && sum.value() < best.value) {
          best.value = sum.value();
          best.fact = std::move(sum);
        }
      }
    }
  }

  // SVD initialization at the numerical rank
  {
    Svd s = svd_jacobi(phi, 1e-12);
    const std::size_t rank = s.u.cols();
    if (rank > 0) {
      Factorization f{ComplexMatrix(m, rank), ComplexMatrix(n, rank)};
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t w = 0; w < rank; ++w) f.x(j, w) = s.u(j, w) * std::sqrt(s.sigma[w]);
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t w = 0; w < rank; ++w) f.y(k, w) = s.v(k, w) * std::sqrt(s.sigma[w]);
      als_improve(phi, std::move(f), iterations, best);
    }
  }
  // identity initialization at full rank
  {
    Factorization f{phi, ComplexMatrix::identity(n)};
    als_improve(phi, std::move(f), iterations, best);
  }
  // seeded random initializations
  {
    Rng rng(seed);
    const std::size_t d = std::min(m, n);
    for (int trial = 0; trial < 2; ++trial) {
      Rng sub = rng.substream(static_cast<std::uint64_t>(trial));
      ComplexMatrix y(n, d);
      for (std::size_t i = 0; i < y.size(); ++i) y.data()[i] = sub.complex_normal();
      ComplexMatrix gy = multiply(adjoint(y), y);
      ComplexMatrix x = solve_gram(gy, multiply(phi, y));
      Factorization f{std::move(x), std::move(y)};
      if (f.residual(phi) <= tol) als_improve(phi, std::move(f), iterations, best);
    }
  }

  MultiplierEstimate est;
  if (best.fact) {
    est.upper = best.value;
    est.upper_certificate = std::move(best.fact);
  }
  return est;
}

MultiplierEstimate estimate(const ComplexMatrix& phi, std::size_t budget,
                            std::size_t iterations, std::uint64_t seed) {
  MultiplierEstimate lo = multiplier_lower(phi, budget, seed);
  MultiplierEstimate hi = multiplier_upper(phi, iterations, seed);
  MultiplierEstimate est;
  est.lower = lo.lower;
  est.lower_certificate = std::move(lo.lower_certificate);
  est.upper = hi.upper;
  est.upper_certificate = std::move(hi.upper_certificate);
  return est;
}

ToeplitzBound toeplitz_upper(const std::vector<cplx>& points_z,
                             const std::vector<cplx>& points_w,
                             const std::vector<ToeplitzAtom>& atoms) {
  if (atoms.empty()) throw std::invalid_argument("toeplitz_upper: empty atom list");
  const std::size_t m = points_z.size(), n = points_w.size(), d = atoms.size();
  ToeplitzBound out;
  out.certificate.x = ComplexMatrix(m, d);
  out.certificate.y = ComplexMatrix(n, d);
  double total = 0.0;
  for (std::size_t w = 0; w < d; ++w) {
    const double aw = std::abs(atoms[w].weight);
    total += aw;
    const double sq = std::sqrt(aw);
    const cplx s = (aw > 0.0) ? atoms[w].weight / sq : cplx(0.0, 0.0);
    const cplx zeta = atoms[w].frequency;
    for (std::size_t j = 0; j < m; ++j) {
      const double ph = points_z[j].real() * zeta.real() + points_z[j].imag() * zeta.imag();
      out.certificate.x(j, w) = s * std::polar(1.0, -ph);
    }
    for (std::size_t k = 0; k < n; ++k) {
      const double ph = points_w[k].real() * zeta.real() + points_w[k].imag() * zeta.imag();
      out.certificate.y(k, w) = sq * std::polar(1.0, -ph);
    }
  }
  out.bound = total;
  out.phi = multiply(out.certificate.x, adjoint(out.certificate.y));
  return out;
}

Factorization stack(Factorization a, Factorization b) {
  if (a.x.rows() != b.x.rows() || a.y.rows() != b.y.rows())
    throw std::invalid_argument("stack: incompatible factorizations");
  const std::size_t da = a.x.cols(), db = b.x.cols();
  Factorization f{ComplexMatrix(a.x.rows(), da + db), ComplexMatrix(a.y.rows(), da + db)};
  for (std::size_t j = 0; j < a.x.rows(); ++j) {
    for (std::size_t w = 0; w < da; ++w) f.x(j, w) = a.x(j, w);
    for (std::size_t w = 0; w < db; ++w) f.x(j, da + w) = b.x(j, w);
  }
  for (std::size_t k = 0; k < a.y.rows(); ++k) {
    for (std::size_t w = 0; w < da; ++w) f.y(k, w) = a.y(k, w);
    for (std::size_t w = 0; w < db; ++w) f.y(k, da + w) = b.y(k, w);
  }
  return f;
}

Factorization tensor_schur(const Factorization& a, const Factorization& b) {
  if (a.x.rows() != b.x.rows() || a.y.rows() != b.y.rows())
    throw std::invalid_argument("tensor_schur: incompatible factorizations");
  const std::size_t da = a.x.cols(), db = b.x.cols();
  Factorization f{ComplexMatrix(a.x.rows(), da * db), ComplexMatrix(a.y.rows(), da * db)};
  for (std::size_t j = 0; j < a.x.rows(); ++j)
    for (std::size_t w = 0; w < da; ++w)
      for (std::size_t v = 0; v < db; ++v) f.x(j, w * db + v) = a.x(j, w) * b.x(j, v);
  for (std::size_t k = 0; k < a.y.rows(); ++k)
    for (std::size_t w = 0; w < da; ++w)
      for (std::size_t v = 0; v < db; ++v) f.y(k, w * db + v) = a.y(k, w) * b.y(k, v);
  return f;
}

Factorization scale(Factorization f, cplx c) {
  // split |c| evenly, put the phase on x
  const double a = std::abs(c);
  const double sq = std::sqrt(a);
  const cplx px = (a > 0.0) ? c / a * sq : cplx(0.0, 0.0);
  f.x *= px;
  f.y *= cplx(sq, 0.0);
  return f;
}

MultiplierEstimate flip(const MultiplierEstimate& est) {
  MultiplierEstimate out;
  out.lower = est.lower;
  out.upper = est.upper;
  if (est.lower_certificate) out.lower_certificate = transpose(*est.lower_certificate);
  if (est.upper_certificate)
    out.upper_certificate = Factorization{conjugate_entries(est.upper_certificate->y),
                                          conjugate_entries(est.upper_certificate->x)};
  return out;
}

void validate(const MultiplierEstimate& est, const ComplexMatrix& phi) {
  if (est.lower > est.upper + 1e-8)
    throw validation_error("MultiplierEstimate: lower exceeds upper");
  if (est.lower_certificate) {
    const ComplexMatrix& b = *est.lower_certificate;
    if (operator_norm(b) > 1.0 + 1e-10)
      throw validation_error("MultiplierEstimate: lower certificate is not a contraction");
    if (operator_norm(schur_product(phi, b)) < est.lower - 1e-8)
      throw validation_error("MultiplierEstimate: lower certificate does not achieve the bound");
  }
  if (std::isfinite(est.upper)) {
    if (!est.upper_certificate)
      throw validation_error("MultiplierEstimate: finite upper bound without certificate");
    if (est.upper_certificate->residual(phi) > entry_tol(phi))
      throw validation_error("MultiplierEstimate: upper certificate does not reproduce phi");
    if (est.upper_certificate->value() > est.upper + 1e-10)
      throw validation_error("MultiplierEstimate: upper certificate exceeds the bound");
  }
}

}  // namespace opmod::schur
