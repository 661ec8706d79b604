#include "opmod/holder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "opmod/rng.hpp"

namespace opmod::holder {

namespace {

ComplexMatrix sgn_pow(const NormalOperator& n, int k) {
  if (k <= 0) return ComplexMatrix::identity(n.dim());
  return n.apply(FunctionSpec::sgn_power(k));
}

NormalOperator random_normal(std::size_t dim, double radius, Rng& rng) {
  std::vector<cplx> eigs(dim);
  for (auto& e : eigs) e = rng.disc_point(radius);
  return NormalOperator(std::move(eigs), haar_unitary(dim, rng));
}

}  // namespace

HnReport hn_lipschitz_check(int n, std::size_t instances, std::size_t dim, std::uint64_t seed) {
  HnReport rep;
  rep.n = n;
  rep.instances = instances;
  const double lip = std::abs(2.0 * n + 1.0);
  const int m = (n >= 0) ? n : -n - 1;  // conj(h_n) = h_{-n-1}, so reduce to m >= 0
  const FunctionSpec hm = FunctionSpec::hn(m);

  for (std::size_t t = 0; t < instances; ++t) {
    Rng rng = Rng(seed).substream(t);
    const std::size_t d = 1 + rng.index(dim);
    NormalOperator n1 = random_normal(d, 1.0, rng);
    NormalOperator n2 = random_normal(d, 1.0, rng);
    const double dn = operator_norm(n1.materialize() - n2.materialize());
    if (dn <= 1e-9) continue;
    const ComplexMatrix diff_m = n1.apply(hm) - n2.apply(hm);
    const double ratio = operator_norm(diff_m) / dn;  // = the h_n ratio, adjoint-invariant
    rep.max_operator_ratio = std::max(rep.max_operator_ratio, ratio);
    if (ratio > lip + 1e-8) ++rep.ratio_violations;

    // telescoping identity for m >= 0:
    //   h_m(N1) - h_m(N2) = sum_{j=0}^m sgn^{2m-2j}(N1) (N1-N2) sgn^{2j}(N2)
    //                     + sum_{j=0}^{m-1} sgn^{2m-2j}(N1) (N2*-N1*) sgn^{2j+2}(N2)
    const ComplexMatrix m1 = n1.materialize(), m2 = n2.materialize();
    const ComplexMatrix d12 = m1 - m2;
    const ComplexMatrix d21s = adjoint(m2) - adjoint(m1);
    ComplexMatrix sum(d, d);
    for (int j = 0; j <= m; ++j)
      sum += multiply(sgn_pow(n1, 2 * (m - j)), multiply(d12, sgn_pow(n2, 2 * j)));
    for (int j = 0; j < m; ++j)
      sum += multiply(sgn_pow(n1, 2 * (m - j)), multiply(d21s, sgn_pow(n2, 2 * j + 2)));
    const double denom = 1.0 + operator_norm(diff_m);
    const double resid = operator_norm(sum - diff_m) / denom;
    rep.max_telescoping_residual = std::max(rep.max_telescoping_residual, resid);
  }

  // scalar sharpness on the unit circle
  for (double h : {1e-3, 1e-4, 1e-5}) {
    for (double base : {0.0, 0.7, 2.1}) {
      const cplx a = std::polar(1.0, base);
      const cplx b = std::polar(1.0, base + h);
      const double q = std::abs(hn_eval(n, a) - hn_eval(n, b)) / std::abs(a - b);
      rep.scalar_circle_ratio = std::max(rep.scalar_circle_ratio, q);
    }
  }
  return rep;
}

namespace {

struct SeminormInfo {
  double value = 0.0;
  std::string method;
};

SeminormInfo holder_seminorm(const FunctionSpec& f, double alpha, double r_cap,
                             std::uint64_t seed) {
  SeminormInfo info;
  if (auto a = f.holder_on_disc(alpha, r_cap)) {
    info.value = *a;
    info.method = "analytic";
  } else {
    info.value = f.sampled_holder(alpha, r_cap, 200000, seed ^ 0xa1fa);
    info.method = "sampled";
  }
  return info;
}

}  // namespace

HolderConstantEstimate holder_ratio_search(const FunctionSpec& f, double alpha,
                                           std::size_t dim, std::size_t budget,
                                           std::uint64_t seed, double r_cap) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("holder_ratio_search: alpha must lie in (0,1)");
  if (f.is_constant())
    throw std::invalid_argument("holder_ratio_search: constant function is degenerate");
  SeminormInfo sn = holder_seminorm(f, alpha, r_cap, seed);
  if (!(sn.value > 0.0))
    throw std::invalid_argument("holder_ratio_search: vanishing Holder seminorm");

  double best_ratio = 0.0;
  double best_delta = 0.0;

  // scalar pairs are dim-1 witnesses; radial and extremal candidates first
  auto scalar_pair = [&](cplx a, cplx b) {
    if (std::abs(a) > r_cap || std::abs(b) > r_cap) return;
    const double d = std::abs(a - b);
    if (d <= 1e-14) return;
    const double q = std::abs(f(a) - f(b)) / std::pow(d, alpha);
    if (q > best_ratio) {
      best_ratio = q;
      best_delta = d;
    }
  };
  for (int j = 0; j < 40; ++j) {
    const double t = r_cap * std::pow(0.5, j);
    scalar_pair(t, 0.0);
    scalar_pair(r_cap, r_cap - std::min(2.0 * r_cap, t));
    scalar_pair(cplx(0.0, t), 0.0);
  }
  {
    Rng rng(seed ^ 0x5ca1a);
    for (int i = 0; i < 4000; ++i) {
      const cplx a = rng.disc_point(r_cap);
      const cplx b = a + std::polar(r_cap * std::pow(2.0, rng.uniform(-30.0, 1.0)),
                                    rng.uniform(0.0, 6.2831853071795864769));
      scalar_pair(a, b);
    }
  }

  for (std::size_t t = 0; t < budget; ++t) {
    Rng rng = Rng(seed).substream(t);
    const std::size_t d = 1 + rng.index(dim);
    NormalOperator n1 = random_normal(d, r_cap, rng);
    // shifted spectrum on a shared frame plus an independent pair, both tried
    std::vector<cplx> shifted = n1.eigenvalues();
    const double step = r_cap * std::pow(2.0, rng.uniform(-20.0, 0.0));
    for (auto& e : shifted) {
      cplx dz = rng.complex_normal();
      const double a = std::abs(dz);
      if (a > 0.0) dz *= step / a;
      e += dz;
      const double ae = std::abs(e);
      if (ae > r_cap) e *= r_cap / ae;
    }
    NormalOperator n2(shifted, n1.conjugator());
    for (const NormalOperator* other : {&n2}) {
      const double dn = operator_norm(n1.materialize() - other->materialize());
      if (dn <= 1e-14) continue;
      const double q = operator_norm(n1.apply(f) - other->apply(f)) / std::pow(dn, alpha);
      if (q > best_ratio) {
        best_ratio = q;
        best_delta = dn;
      }
    }
  }

  HolderConstantEstimate est;
  est.alpha = alpha;
  est.raw_ratio = best_ratio;
  est.holder_seminorm = sn.value;
  est.seminorm_method = sn.method;
  est.lower = best_ratio / sn.value;
  est.delta_used = best_delta;
  est.r_cap = r_cap;
  return est;
}

QuasicommutatorReport quasicommutator_experiment(const FunctionSpec& f, double alpha,
                                                 std::size_t instances, std::size_t dim,
                                                 std::uint64_t seed, double r_cap) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("quasicommutator_experiment: alpha must lie in (0,1)");
  QuasicommutatorReport rep;
  rep.alpha = alpha;
  rep.instances = instances;
  SeminormInfo sn = holder_seminorm(f, alpha, r_cap, seed);
  rep.holder_seminorm = sn.value;
  rep.seminorm_method = sn.method;

  // measured scalar modulus on a log grid, monotone closure, for the
  // omega** comparison
  std::vector<double> ts, ws;
  double running = 0.0;
  for (int j = -24; j <= 3; ++j) {
    const double t = std::ldexp(2.0 * r_cap, j) / 8.0;
    running = std::max(running, f.modulus_lower(t, r_cap, 1024, seed ^ 0x0317));
    ts.push_back(t);
    ws.push_back(running);
  }
  moduli::ModulusSpec measured = moduli::ModulusSpec::table(ts, ws);

  double sum_ratio = 0.0;
  for (std::size_t t = 0; t < instances; ++t) {
    Rng rng = Rng(seed).substream(t);
    const std::size_t d = 1 + rng.index(dim);
    NormalOperator n1 = random_normal(d, r_cap, rng);
    NormalOperator n2 = random_normal(d, r_cap, rng);
    ComplexMatrix r(d, d);
    for (std::size_t i = 0; i < r.size(); ++i) r.data()[i] = rng.complex_normal();
    const double nr = operator_norm(r);
    if (nr <= 0.0) continue;
    r *= cplx(1.0 / nr, 0.0);
    const ComplexMatrix m1 = n1.materialize(), m2 = n2.materialize();
    const double comm = operator_norm(multiply(m1, r) - multiply(r, m2));
    const double num = operator_norm(multiply(n1.apply(f), r) - multiply(r, n2.apply(f)));
    if (comm <= 1e-14) {
      if (num > 1e-10) ++rep.violations;
      continue;
    }
    const double den = sn.value * std::pow(comm, alpha);
    if (den <= 0.0) continue;
    ++rep.used;
    const double ratio = num / den;
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    sum_ratio += ratio;
    const double om2 = moduli::omega_transform(measured, comm, 2);
    if (om2 > 0.0 && std::isfinite(om2))
      rep.max_omega_ratio = std::max(rep.max_omega_ratio, num / om2);
  }
  rep.mean_ratio = rep.used > 0 ? sum_ratio / static_cast<double>(rep.used) : 0.0;
  return rep;
}

double halpha_delta(double alpha) { return 2.0 * std::exp(-1.0 / (1.0 - alpha)); }

std::vector<HolderConstantEstimate> halpha_lower(const std::vector<double>& alpha_grid,
                                                 const FunctionSpec& f,
                                                 const moduli::ModulusEnvelope& envelope,
                                                 double r_cap) {
  // hypothesis checks by sampling: sup <= 1 and Lip <= 1
  {
    Rng rng(0xbeefULL);
    double sup = 0.0, lip = 0.0;
    for (int i = 0; i < 4096; ++i) {
      const cplx a = rng.disc_point(r_cap);
      sup = std::max(sup, std::abs(f(a)));
      const cplx b = a + std::polar(r_cap * std::pow(2.0, rng.uniform(-20.0, -1.0)),
                                    rng.uniform(0.0, 6.2831853071795864769));
      if (std::abs(b) <= r_cap && std::abs(a - b) > 1e-14)
        lip = std::max(lip, std::abs(f(a) - f(b)) / std::abs(a - b));
    }
    if (sup > 1.0 + 1e-6)
      throw std::invalid_argument("halpha_lower: sampled sup exceeds 1");
    if (lip > 1.0 + 5e-2)
      throw std::invalid_argument("halpha_lower: sampled Lipschitz constant exceeds 1");
  }
  auto envelope_at = [&envelope](double d) {
    const auto& xs = envelope.deltas;
    const auto& ys = envelope.values;
    if (xs.empty()) return 0.0;
    if (d <= xs.front()) {
      const bool scalable =
          envelope.kind == moduli::ModulusKind::SA || envelope.kind == moduli::ModulusKind::C;
      return scalable ? ys.front() * (d / xs.front()) : 0.0;
    }
    if (d >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), d);
    const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    const std::size_t lo = hi - 1;
    // lower bounds stay valid under the left-endpoint reading; interpolation
    // would presume continuity the envelope does not certify
    (void)hi;
    return ys[lo];
  };
  std::vector<HolderConstantEstimate> out;
  for (double alpha : alpha_grid) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
      throw std::invalid_argument("halpha_lower: alpha must lie in (0,1)");
    const double delta = halpha_delta(alpha);
    const double lam_bound = std::pow(2.0, 1.0 - alpha);  // ||f||_{La} <= 2^{1-a}
    HolderConstantEstimate est;
    est.alpha = alpha;
    est.delta_used = delta;
    est.holder_seminorm = lam_bound;
    est.seminorm_method = "sup-lip interpolation bound";
    est.raw_ratio = envelope_at(delta) / std::pow(delta, alpha);
    est.lower = est.raw_ratio / lam_bound;
    est.r_cap = r_cap;
    out.push_back(est);
  }
  return out;
}

}  // namespace opmod::holder
