#include "opmod/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "opmod/function_spec.hpp"

namespace opmod {

namespace {

struct PowerResult {
  double theta = 0.0;     // Rayleigh quotient of M*M, i.e. sigma_max^2 candidate
  double gap_est = 0.0;   // geometric extrapolation of the remaining gap
  bool converged = false;
};

// Power iteration on M*M with the all-ones (or given) start. Stops once the
// Rayleigh-quotient change stays below 1e-12 relative for three consecutive
// iterations; the returned gap estimate extrapolates the geometric tail.
PowerResult power_iterate(const std::function<void(const cplx*, cplx*)>& apply,
                          const std::function<void(const cplx*, cplx*)>& apply_adjoint,
                          std::size_t rows, std::size_t cols, std::vector<cplx> v) {
  constexpr int kMaxIt = 10000;
  constexpr double kTol = 1e-12;

  double nv = 0.0;
  for (const auto& x : v) nv += std::norm(x);
  nv = std::sqrt(nv);
  if (nv == 0.0) return {};
  for (auto& x : v) x /= nv;

  std::vector<cplx> w(rows), u(cols);
  PowerResult res;
  double prev_theta = -1.0, prev_change = -1.0;
  int small_streak = 0;
  for (int it = 0; it < kMaxIt; ++it) {
    apply(v.data(), w.data());
    double theta = 0.0;
    for (const auto& x : w) theta += std::norm(x);  // = v* (M*M) v for unit v
    res.theta = std::max(res.theta, theta);
    if (theta == 0.0) {  // start vector in the null space
      res.converged = true;
      return res;
    }
    if (prev_theta >= 0.0) {
      const double change = std::abs(theta - prev_theta);
      double q = 0.0;
      if (prev_change > 0.0 && change > 0.0) q = std::min(change / prev_change, 0.9999);
      res.gap_est = change * (q > 0.0 ? q / (1.0 - q) : 1.0);
      small_streak = (change <= kTol * theta) ? small_streak + 1 : 0;
      if (small_streak >= 3 && it >= 4) {
        res.converged = true;
        return res;
      }
      prev_change = change;
    }
    prev_theta = theta;
    apply_adjoint(w.data(), u.data());
    double nu = 0.0;
    for (const auto& x : u) nu += std::norm(x);
    nu = std::sqrt(nu);
    if (nu == 0.0) {
      res.converged = true;
      return res;
    }
    for (std::size_t j = 0; j < cols; ++j) v[j] = u[j] / nu;
  }
  return res;
}

std::vector<cplx> ones_start(std::size_t n) { return std::vector<cplx>(n, cplx(1.0, 0.0)); }

std::vector<cplx> seeded_start(std::size_t n) {
  Rng rng(0x0c0ffee123456789ULL);
  std::vector<cplx> v(n);
  for (auto& x : v) x = rng.complex_normal();
  return v;
}

}  // namespace

double operator_norm(const ComplexMatrix& m) {
  if (m.empty()) throw std::invalid_argument("operator_norm: empty matrix");
  auto apply = [&m](const cplx* x, cplx* y) { matvec(m, x, y); };
  auto apply_adj = [&m](const cplx* x, cplx* y) { matvec_adjoint(m, x, y); };
  PowerResult a = power_iterate(apply, apply_adj, m.rows(), m.cols(), ones_start(m.cols()));
  PowerResult b = power_iterate(apply, apply_adj, m.rows(), m.cols(), seeded_start(m.cols()));
  const PowerResult& best = (a.theta >= b.theta) ? a : b;
  // the gap extrapolation must support the 1e-10 relative contract, else the
  // certified fallback takes over
  if (a.converged && b.converged && best.gap_est <= 1e-10 * best.theta)
    return std::sqrt(best.theta);
  ComplexMatrix h = multiply(adjoint(m), m);
  std::vector<double> w;
  ComplexMatrix v;
  hermitian_eig(h, w, v);
  return std::sqrt(std::max(0.0, w.empty() ? 0.0 : w.back()));
}

namespace {

// largest eigenvalue of the symmetric tridiagonal T = B^T B of the lower
// bidiagonal GKL matrix (alpha on the diagonal, beta below), by Sturm bisection
double gkl_sigma_max(const std::vector<double>& alpha, const std::vector<double>& beta) {
  const std::size_t k = alpha.size();
  std::vector<double> d(k), e(k);  // e[i] couples i-1 and i
  for (std::size_t i = 0; i < k; ++i) {
    d[i] = alpha[i] * alpha[i] + (i < beta.size() ? beta[i] * beta[i] : 0.0);
    e[i] = (i > 0) ? alpha[i] * beta[i - 1] : 0.0;
  }
  double hi = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    hi = std::max(hi, d[i] + std::abs(e[i]) + (i + 1 < k ? std::abs(e[i + 1]) : 0.0));
  double lo = 0.0;
  auto count_below = [&](double x) {
    // Sturm sequence: number of eigenvalues < x
    int cnt = 0;
    double q = d[0] - x;
    if (q < 0.0) ++cnt;
    for (std::size_t i = 1; i < k; ++i) {
      const double denom = (std::abs(q) < 1e-300) ? ((q < 0.0) ? -1e-300 : 1e-300) : q;
      q = d[i] - x - e[i] * e[i] / denom;
      if (q < 0.0) ++cnt;
    }
    return cnt;
  };
  for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(mid) >= static_cast<int>(k))
      hi = mid;
    else
      lo = mid;
  }
  return std::sqrt(std::max(0.0, 0.5 * (lo + hi)));
}

}  // namespace

NormRange operator_norm_range(const LinearOperator& op, std::size_t max_iter) {
  if (op.rows == 0 || op.cols == 0)
    throw std::invalid_argument("operator_norm_range: empty operator");
  const std::size_t n = op.cols, m = op.rows;
  std::vector<std::vector<cplx>> vs, us;
  std::vector<double> alpha, beta;

  std::vector<cplx> v = ones_start(n);
  {
    Rng rng(0x5eedba5eULL);
    for (auto& x : v) x += 0.01 * rng.complex_normal();  // break symmetry-invariant starts
  }
  double nv = 0.0;
  for (auto& x : v) nv += std::norm(x);
  nv = std::sqrt(nv);
  for (auto& x : v) x /= nv;

  auto reorth = [](std::vector<cplx>& w, const std::vector<std::vector<cplx>>& basis) {
    for (const auto& b : basis) {
      cplx dot = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) dot += std::conj(b[i]) * w[i];
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= dot * b[i];
    }
  };

  NormRange out;
  std::vector<cplx> u(m), w(n);
  double prev_sigma = -1.0;
  double last_change = 0.0;
  int small_streak = 0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    // u_{k} = M v_k - beta_{k-1} u_{k-1}
    op.apply(v.data(), u.data());
    if (!us.empty())
      for (std::size_t i = 0; i < m; ++i) u[i] -= beta.back() * us.back()[i];
    reorth(u, us);
    double na = 0.0;
    for (const auto& x : u) na += std::norm(x);
    na = std::sqrt(na);
    if (na <= 1e-300) break;
    for (auto& x : u) x /= na;
    alpha.push_back(na);
    vs.push_back(v);
    us.push_back(u);

    const double sigma = gkl_sigma_max(alpha, beta);
    out.lower = std::max(out.lower, sigma);
    if (prev_sigma >= 0.0) {
      last_change = std::abs(sigma - prev_sigma);
      small_streak = (last_change <= 1e-11 * (sigma + 1e-300)) ? small_streak + 1 : 0;
      if (small_streak >= 3) {
        out.converged = true;
        break;
      }
    }
    prev_sigma = sigma;

    // v_{k+1} = M* u_k - alpha_k v_k
    op.apply_adjoint(u.data(), w.data());
    for (std::size_t i = 0; i < n; ++i) w[i] -= alpha.back() * v[i];
    reorth(w, vs);
    double nb = 0.0;
    for (const auto& x : w) nb += std::norm(x);
    nb = std::sqrt(nb);
    if (nb <= 1e-300) {
      out.converged = true;  // invariant subspace exhausted: exact
      break;
    }
    beta.push_back(nb);
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nb;
  }
  const double slack = out.converged ? 1e-8 : std::max(1e-6, 50.0 * last_change / (out.lower + 1e-300));
  out.upper = out.lower * (1.0 + slack) + 1e-300;
  return out;
}

// ---------------------------------------------------------------------------
// Jacobi eigensolver
// ---------------------------------------------------------------------------

void hermitian_eig(const ComplexMatrix& h, std::vector<double>& w, ComplexMatrix& v) {
  if (!h.is_square()) throw std::invalid_argument("hermitian_eig: matrix not square");
  const std::size_t n = h.rows();
  ComplexMatrix a = h;
  // Symmetrize once; callers pass Hermitian data up to rounding.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const cplx m = 0.5 * (a(i, j) + std::conj(a(j, i)));
      a(i, j) = m;
      a(j, i) = std::conj(m);
    }
  v = ComplexMatrix::identity(n);

  const double fro = a.frobenius_norm();
  const double stop = std::max(1e-300, 1e-15 * fro);
  constexpr int kMaxSweeps = 60;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * std::norm(a(p, q));
    if (std::sqrt(off) <= stop) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double abs_apq = std::abs(apq);
        if (abs_apq <= 1e-300) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const cplx phase = apq / abs_apq;
        const double tau = (app - aqq) / (2.0 * abs_apq);
        const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                      : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // Unitary J acting on columns p,q: [[c, -s*phase], [s*conj(phase), c]]
        const cplx jp = -s * phase;
        const cplx jq = s * std::conj(phase);
        // A <- J* A J
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * c + akq * jq;
          a(k, q) = akp * jp + akq * c;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk + std::conj(jq) * aqk;
          a(q, k) = std::conj(jp) * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * c + vkq * jq;
          v(k, q) = vkp * jp + vkq * c;
        }
      }
    }
  }

  w.resize(n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
  std::sort(order.begin(), order.end(),
            [&diag](std::size_t x, std::size_t y) { return diag[x] < diag[y]; });
  ComplexMatrix vs(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    w[j] = diag[order[j]];
    for (std::size_t i = 0; i < n; ++i) vs(i, j) = v(i, order[j]);
  }
  v = std::move(vs);
}

Svd svd_jacobi(const ComplexMatrix& m, double cutoff_rel) {
  Svd out;
  ComplexMatrix h = multiply(adjoint(m), m);
  std::vector<double> w;
  hermitian_eig(h, w, out.v);
  const std::size_t n = m.cols();
  // eigenvalues ascending -> reorder descending
  ComplexMatrix vd(n, n);
  out.sigma.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.sigma[j] = std::sqrt(std::max(0.0, w[n - 1 - j]));
    for (std::size_t i = 0; i < n; ++i) vd(i, j) = out.v(i, n - 1 - j);
  }
  out.v = std::move(vd);
  const double smax = out.sigma.empty() ? 0.0 : out.sigma[0];
  std::size_t rank = 0;
  while (rank < n && out.sigma[rank] > cutoff_rel * smax && out.sigma[rank] > 0.0) ++rank;
  out.u = ComplexMatrix(m.rows(), rank);
  std::vector<cplx> col(n), mu(m.rows());
  for (std::size_t j = 0; j < rank; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = out.v(i, j);
    matvec(m, col.data(), mu.data());
    for (std::size_t i = 0; i < m.rows(); ++i) out.u(i, j) = mu[i] / out.sigma[j];
  }
  return out;
}

void qr_decompose(const ComplexMatrix& m, ComplexMatrix& q, ComplexMatrix& r) {
  const std::size_t rows = m.rows(), cols = m.cols();
  r = m;
  q = ComplexMatrix::identity(rows);
  std::vector<cplx> vh(rows);
  for (std::size_t k = 0; k < std::min(rows, cols); ++k) {
    double xnorm = 0.0;
    for (std::size_t i = k; i < rows; ++i) xnorm += std::norm(r(i, k));
    xnorm = std::sqrt(xnorm);
    if (xnorm <= 1e-300) continue;
    const cplx rkk = r(k, k);
    const double arkk = std::abs(rkk);
    const cplx phase = (arkk > 0.0) ? rkk / arkk : cplx(1.0, 0.0);
    const cplx alpha = -phase * xnorm;
    double vnorm2 = 0.0;
    for (std::size_t i = k; i < rows; ++i) {
      vh[i] = r(i, k);
      if (i == k) vh[i] -= alpha;
      vnorm2 += std::norm(vh[i]);
    }
    if (vnorm2 <= 1e-300) continue;
    // H = I - 2 v v* / (v*v);  R <- H R, Q <- Q H
    for (std::size_t j = k; j < cols; ++j) {
      cplx s = 0.0;
      for (std::size_t i = k; i < rows; ++i) s += std::conj(vh[i]) * r(i, j);
      s *= 2.0 / vnorm2;
      for (std::size_t i = k; i < rows; ++i) r(i, j) -= s * vh[i];
    }
    for (std::size_t i = 0; i < rows; ++i) {
      cplx s = 0.0;
      for (std::size_t j = k; j < rows; ++j) s += q(i, j) * vh[j];
      s *= 2.0 / vnorm2;
      for (std::size_t j = k; j < rows; ++j) q(i, j) -= s * std::conj(vh[j]);
    }
  }
}

ComplexMatrix haar_unitary(std::size_t n, Rng& rng) {
  ComplexMatrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = rng.complex_normal();
  ComplexMatrix q, r;
  qr_decompose(g, q, r);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx rjj = r(j, j);
    const double a = std::abs(rjj);
    const cplx phase = (a > 0.0) ? rjj / a : cplx(1.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) q(i, j) *= phase;
  }
  return q;
}

ComplexMatrix random_hermitian(std::size_t n, Rng& rng) {
  ComplexMatrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = rng.complex_normal();
  ComplexMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = 0.5 * (g(i, j) + std::conj(g(j, i)));
  return h;
}

ComplexMatrix hermitian_calculus(const ComplexMatrix& h,
                                 const std::function<double(double)>& f) {
  std::vector<double> w;
  ComplexMatrix v;
  hermitian_eig(h, w, v);
  const std::size_t n = h.rows();
  ComplexMatrix vf(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) vf(i, j) = v(i, j) * f(w[j]);
  return multiply(vf, adjoint(v));
}

ComplexMatrix sqrt_psd(const ComplexMatrix& h) {
  return hermitian_calculus(h, [](double x) { return std::sqrt(std::max(0.0, x)); });
}

ComplexMatrix unitary_exp(const ComplexMatrix& h, double t) {
  std::vector<double> w;
  ComplexMatrix v;
  hermitian_eig(h, w, v);
  const std::size_t n = h.rows();
  ComplexMatrix vf(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      vf(i, j) = v(i, j) * std::polar(1.0, t * w[j]);
  return multiply(vf, adjoint(v));
}

// ---------------------------------------------------------------------------
// NormalOperator
// ---------------------------------------------------------------------------

NormalOperator::NormalOperator(std::vector<cplx> eigenvalues, ComplexMatrix conjugator)
    : eigenvalues_(std::move(eigenvalues)), conjugator_(std::move(conjugator)) {
  if (!conjugator_.is_square() || conjugator_.rows() != eigenvalues_.size())
    throw std::invalid_argument("NormalOperator: conjugator shape does not match spectrum size");
  for (const auto& ev : eigenvalues_)
    if (!std::isfinite(ev.real()) || !std::isfinite(ev.imag()))
      throw std::invalid_argument("NormalOperator: non-finite eigenvalue");
  ComplexMatrix defect = multiply(adjoint(conjugator_), conjugator_);
  defect -= ComplexMatrix::identity(conjugator_.rows());
  const double d = operator_norm(defect);
  if (d > kMembershipTol)
    throw validation_error("NormalOperator: conjugator not unitary, defect norm " +
                           std::to_string(d));
}

NormalOperator NormalOperator::diagonal(std::vector<cplx> eigenvalues) {
  const std::size_t n = eigenvalues.size();
  return NormalOperator(std::move(eigenvalues), ComplexMatrix::identity(n));
}

ComplexMatrix NormalOperator::materialize() const {
  const std::size_t n = dim();
  ComplexMatrix ud(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) ud(i, j) = conjugator_(i, j) * eigenvalues_[j];
  return multiply(ud, adjoint(conjugator_));
}

ComplexMatrix NormalOperator::apply(const FunctionSpec& f) const {
  const std::size_t n = dim();
  ComplexMatrix ud(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx fj = f(eigenvalues_[j]);
    for (std::size_t i = 0; i < n; ++i) ud(i, j) = conjugator_(i, j) * fj;
  }
  return multiply(ud, adjoint(conjugator_));
}

NormalOperator NormalOperator::adjoint_op() const {
  std::vector<cplx> conj_eigs(eigenvalues_.size());
  for (std::size_t i = 0; i < eigenvalues_.size(); ++i) conj_eigs[i] = std::conj(eigenvalues_[i]);
  return NormalOperator(std::move(conj_eigs), conjugator_);
}

double NormalOperator::spectral_radius() const {
  double r = 0.0;
  for (const auto& ev : eigenvalues_) r = std::max(r, std::abs(ev));
  return r;
}

ComplexMatrix apply_function(const FunctionSpec& f, const NormalOperator& n) {
  return n.apply(f);
}

// ---------------------------------------------------------------------------
// operator classes
// ---------------------------------------------------------------------------

double membership_defect(const ComplexMatrix& m, OperatorClass cls) {
  if (!m.is_square() && cls != OperatorClass::CONTRACTION && cls != OperatorClass::ANY)
    return std::numeric_limits<double>::infinity();
  switch (cls) {
    case OperatorClass::SA:
      return operator_norm(m - adjoint(m));
    case OperatorClass::U: {
      ComplexMatrix d = multiply(adjoint(m), m);
      d -= ComplexMatrix::identity(m.rows());
      return operator_norm(d);
    }
    case OperatorClass::USA:
      return std::max(membership_defect(m, OperatorClass::SA),
                      membership_defect(m, OperatorClass::U));
    case OperatorClass::P: {
      const double sa = operator_norm(m - adjoint(m));
      ComplexMatrix d = multiply(m, m);
      d -= m;
      return std::max(sa, operator_norm(d));
    }
    case OperatorClass::CONTRACTION:
      return std::max(0.0, operator_norm(m) - 1.0);
    case OperatorClass::ANY:
      return 0.0;
  }
  return 0.0;
}

bool is_member(const ComplexMatrix& m, OperatorClass cls, double tol) {
  if (m.empty()) return false;
  return membership_defect(m, cls) <= tol * (1.0 + operator_norm(m));
}

std::string class_name(OperatorClass cls) {
  switch (cls) {
    case OperatorClass::SA: return "SA";
    case OperatorClass::U: return "U";
    case OperatorClass::USA: return "USA";
    case OperatorClass::P: return "P";
    case OperatorClass::CONTRACTION: return "CONTRACTION";
    case OperatorClass::ANY: return "ANY";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// block lifts
// ---------------------------------------------------------------------------

NormalOperator block_diag(const NormalOperator& n1, const NormalOperator& n2) {
  std::vector<cplx> eigs = n1.eigenvalues();
  eigs.insert(eigs.end(), n2.eigenvalues().begin(), n2.eigenvalues().end());
  const std::size_t d1 = n1.dim(), d2 = n2.dim();
  ComplexMatrix u(d1 + d2, d1 + d2);
  for (std::size_t i = 0; i < d1; ++i)
    for (std::size_t j = 0; j < d1; ++j) u(i, j) = n1.conjugator()(i, j);
  for (std::size_t i = 0; i < d2; ++i)
    for (std::size_t j = 0; j < d2; ++j) u(d1 + i, d1 + j) = n2.conjugator()(i, j);
  return NormalOperator(std::move(eigs), std::move(u));
}

ComplexMatrix antidiag_sym(const ComplexMatrix& r) {
  return block2x2(ComplexMatrix::zero(r.rows(), r.rows()), r, adjoint(r),
                  ComplexMatrix::zero(r.cols(), r.cols()));
}

ComplexMatrix corner_embed(const ComplexMatrix& r) {
  return block2x2(ComplexMatrix::zero(r.rows(), r.rows()), r,
                  ComplexMatrix::zero(r.cols(), r.rows()),
                  ComplexMatrix::zero(r.cols(), r.cols()));
}

ComplexMatrix swap_lift(std::size_t n) {
  ComplexMatrix i = ComplexMatrix::identity(n);
  return block2x2(ComplexMatrix::zero(n, n), i, i, ComplexMatrix::zero(n, n));
}

ComplexMatrix unitary_dilation(const ComplexMatrix& a, double tau) {
  if (!is_member(a, OperatorClass::SA))
    throw std::invalid_argument("unitary_dilation: block is not self-adjoint");
  const double na = operator_norm(a);
  if (std::abs(tau) * na >= 1.0)
    throw std::invalid_argument("unitary_dilation: ||tau A|| >= 1");
  ComplexMatrix a2 = multiply(a, a);
  a2 *= cplx(tau * tau, 0.0);
  ComplexMatrix arg = ComplexMatrix::identity(a.rows()) - a2;
  ComplexMatrix s = sqrt_psd(arg);
  ComplexMatrix ta = a;
  ta *= cplx(tau, 0.0);
  ComplexMatrix u = block2x2(ta, s, cplx(-1.0, 0.0) * s, ta);
  const double defect = membership_defect(u, OperatorClass::U);
  if (defect > kMembershipTol * (1.0 + operator_norm(u)))
    throw validation_error("unitary_dilation: result failed unitarity check, defect " +
                           std::to_string(defect));
  return u;
}

}  // namespace opmod
