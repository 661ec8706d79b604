#include "opmod/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "opmod/fourier.hpp"
#include "opmod/lattice.hpp"
#include "opmod/quadrature.hpp"
#include "opmod/rng.hpp"
#include "opmod/schur.hpp"

namespace opmod::moduli {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// ModulusSpec
// ---------------------------------------------------------------------------

ModulusSpec ModulusSpec::power(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("ModulusSpec::power: alpha must lie in (0,1)");
  ModulusSpec m;
  m.kind_ = Kind::Power;
  m.alpha_ = alpha;
  return m;
}

ModulusSpec ModulusSpec::linear() {
  ModulusSpec m;
  m.kind_ = Kind::Linear;
  return m;
}

ModulusSpec ModulusSpec::bounded_power(double alpha, double cap) {
  if (!(alpha > 0.0) || alpha > 1.0 || !(cap > 0.0))
    throw std::invalid_argument("ModulusSpec::bounded_power: need alpha in (0,1], cap > 0");
  ModulusSpec m;
  m.kind_ = Kind::BoundedPower;
  m.alpha_ = alpha;
  m.cap_ = cap;
  return m;
}

ModulusSpec ModulusSpec::table(std::vector<double> ts, std::vector<double> ws) {
  if (ts.size() != ws.size() || ts.size() < 2)
    throw std::invalid_argument("ModulusSpec::table: need >=2 matching samples");
  for (std::size_t i = 1; i < ts.size(); ++i)
    if (!(ts[i] > ts[i - 1]) || ws[i] < ws[i - 1])
      throw std::invalid_argument("ModulusSpec::table: knots must increase, values nondecreasing");
  if (!(ts.front() >= 0.0) || ws.front() < 0.0)
    throw std::invalid_argument("ModulusSpec::table: domain and values must be nonnegative");
  ModulusSpec m;
  m.kind_ = Kind::Table;
  m.ts_ = std::move(ts);
  m.ws_ = std::move(ws);
  return m;
}

double ModulusSpec::operator()(double t) const {
  if (!(t >= 0.0)) throw std::invalid_argument("ModulusSpec: argument must be >= 0");
  switch (kind_) {
    case Kind::Power: return std::pow(t, alpha_);
    case Kind::Linear: return t;
    case Kind::BoundedPower: return std::min(std::pow(t, alpha_), cap_);
    case Kind::Table: {
      if (t <= ts_.front()) return ws_.front() * (ts_.front() > 0.0 ? t / ts_.front() : 1.0);
      if (t >= ts_.back()) return ws_.back();  // constant extension
      auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
      const std::size_t hi = static_cast<std::size_t>(it - ts_.begin());
      const std::size_t lo = hi - 1;
      const double u = (t - ts_[lo]) / (ts_[hi] - ts_[lo]);
      return ws_[lo] + u * (ws_[hi] - ws_[lo]);
    }
  }
  return 0.0;
}

std::string ModulusSpec::name() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Power: os << "t^" << alpha_; break;
    case Kind::Linear: os << "t"; break;
    case Kind::BoundedPower: os << "min(t^" << alpha_ << "," << cap_ << ")"; break;
    case Kind::Table: os << "table[" << ts_.size() << "]"; break;
  }
  return os.str();
}

bool ModulusSpec::check_axioms(double tmax, std::size_t samples) const {
  const auto& w = *this;
  if (w(0.0) > 1e-10) return false;
  double prev = 0.0;
  for (std::size_t i = 1; i <= samples; ++i) {
    const double t = tmax * static_cast<double>(i) / static_cast<double>(samples);
    const double v = w(t);
    if (v < prev - 1e-12) return false;
    prev = v;
  }
  for (std::size_t i = 1; i < samples; ++i)
    for (std::size_t j = i; j < samples; i += 3, j += 7) {
      const double x = tmax * static_cast<double>(i) / static_cast<double>(samples);
      const double y = tmax * static_cast<double>(j) / static_cast<double>(samples);
      if (x + y > tmax) break;
      if (w(x + y) > w(x) + w(y) + 1e-10) return false;
    }
  return true;
}

double omega_transform_quadrature(const ModulusSpec& omega, double delta, int order) {
  if (!(delta > 0.0)) throw std::invalid_argument("omega_transform: delta must be positive");
  if (order != 1 && order != 2) throw std::invalid_argument("omega_transform: order is 1 or 2");
  if (omega.kind() == ModulusSpec::Kind::Linear) return kInf;
  double t_end = std::max(delta * 1024.0, 1024.0);
  if (omega.kind() == ModulusSpec::Kind::BoundedPower)
    t_end = std::max(t_end, 2.0 * std::pow(omega.cap(), 1.0 / omega.alpha()));
  auto integrand = [&](double t) {
    const double base = omega(t) / (t * t);
    return order == 1 ? base : base * std::log(t / delta);
  };
  double integral = 0.0;
  double a = delta;
  while (a < t_end) {
    const double b = std::min(2.0 * a, t_end);
    integral += adaptive_simpson(integrand, a, b, 1e-13);
    a = b;
  }
  // analytic tails: exact power continuation for the power modulus, exact
  // constant continuation for the bounded kinds
  double tail;
  if (omega.kind() == ModulusSpec::Kind::Power) {
    const double al = omega.alpha();
    const double head = std::pow(t_end, al - 1.0);
    tail = (order == 1)
               ? head / (1.0 - al)
               : head * (std::log(t_end / delta) / (1.0 - al) + 1.0 / ((1.0 - al) * (1.0 - al)));
  } else {
    const double wtail = omega(t_end);
    tail = (order == 1) ? wtail / t_end : wtail * (std::log(t_end / delta) + 1.0) / t_end;
  }
  return delta * (integral + tail);
}

double omega_transform(const ModulusSpec& omega, double delta, int order) {
  if (!(delta > 0.0)) throw std::invalid_argument("omega_transform: delta must be positive");
  if (order != 1 && order != 2) throw std::invalid_argument("omega_transform: order is 1 or 2");
  switch (omega.kind()) {
    case ModulusSpec::Kind::Linear:
      return kInf;  // harmonic divergence
    case ModulusSpec::Kind::Power: {
      const double a = omega.alpha();
      const double base = std::pow(delta, a);
      return order == 1 ? base / (1.0 - a) : base / ((1.0 - a) * (1.0 - a));
    }
    default:
      return omega_transform_quadrature(omega, delta, order);
  }
}

// ---------------------------------------------------------------------------
// witnesses
// ---------------------------------------------------------------------------

std::string kind_name(ModulusKind k) {
  switch (k) {
    case ModulusKind::PLAIN: return "PLAIN";
    case ModulusKind::SA: return "SA";
    case ModulusKind::C: return "C";
    case ModulusKind::U: return "U";
    case ModulusKind::USA: return "USA";
    case ModulusKind::P: return "P";
  }
  return "?";
}

ModulusKind kind_from_name(const std::string& s) {
  if (s == "PLAIN" || s == "plain") return ModulusKind::PLAIN;
  if (s == "SA" || s == "sa") return ModulusKind::SA;
  if (s == "C" || s == "c") return ModulusKind::C;
  if (s == "U" || s == "u") return ModulusKind::U;
  if (s == "USA" || s == "usa") return ModulusKind::USA;
  if (s == "P" || s == "p") return ModulusKind::P;
  throw std::invalid_argument("unknown modulus kind: " + s);
}

double witness_constraint(const ModulusWitness& w) {
  if (w.kind == ModulusKind::PLAIN)
    return operator_norm(w.n1.materialize() - w.n2.materialize());
  return operator_norm(multiply(w.n1.materialize(), w.partner) -
                       multiply(w.partner, w.n2.materialize()));
}

double witness_value(const ModulusWitness& w, const FunctionSpec& f) {
  if (w.kind == ModulusKind::PLAIN) return operator_norm(w.n1.apply(f) - w.n2.apply(f));
  return operator_norm(multiply(w.n1.apply(f), w.partner) - multiply(w.partner, w.n2.apply(f)));
}

namespace {

OperatorClass partner_class(ModulusKind k) {
  switch (k) {
    case ModulusKind::SA: return OperatorClass::SA;
    case ModulusKind::C: return OperatorClass::CONTRACTION;
    case ModulusKind::U: return OperatorClass::U;
    case ModulusKind::USA: return OperatorClass::USA;
    case ModulusKind::P: return OperatorClass::P;
    case ModulusKind::PLAIN: return OperatorClass::ANY;
  }
  return OperatorClass::ANY;
}

}  // namespace

void validate_witness(const ModulusWitness& w) {
  if (w.kind != ModulusKind::PLAIN) {
    if (w.partner.empty()) throw validation_error("witness: missing partner operator");
    if (!is_member(w.partner, partner_class(w.kind)))
      throw validation_error("witness: partner is not a member of class " +
                             class_name(partner_class(w.kind)));
    // SA and C witnesses arise from contraction scaling; the partner must stay
    // inside the unit ball in every kind
    if (operator_norm(w.partner) > 1.0 + 1e-10)
      throw validation_error("witness: partner exceeds the unit ball");
  }
  const double c = witness_constraint(w);
  if (c > w.delta * (1.0 + 1e-9) + 1e-10)
    throw validation_error("witness: constraint " + std::to_string(c) + " exceeds delta " +
                           std::to_string(w.delta));
  const FunctionSpec f = FunctionSpec::parse(w.f_id);
  const double v = witness_value(w, f);
  if (std::abs(v - w.value) > 1e-9 * (1.0 + std::abs(v)))
    throw validation_error("witness: stored value " + std::to_string(w.value) +
                           " does not match recomputed " + std::to_string(v));
}

ModulusWitness witness_scale(const ModulusWitness& w, double tau) {
  if (!(tau > 0.0) || tau > 1.0)
    throw std::invalid_argument("witness_scale: tau must lie in (0,1]");
  if (w.kind != ModulusKind::SA && w.kind != ModulusKind::C)
    throw std::invalid_argument("witness_scale: only SA and C witnesses scale");
  ModulusWitness out = w;
  out.partner *= cplx(tau, 0.0);
  out.delta = tau * w.delta;
  out.value = tau * w.value;
  const FunctionSpec f = FunctionSpec::parse(out.f_id);
  const double v = witness_value(out, f);
  if (std::abs(v - out.value) > 1e-10 * (1.0 + std::abs(v)))
    throw validation_error("witness_scale: scaled value failed revalidation");
  out.value = v;
  return out;
}

ModulusWitness witness_p_to_usa(const ModulusWitness& w) {
  if (w.kind != ModulusKind::P) throw std::invalid_argument("witness_p_to_usa: needs a P witness");
  ModulusWitness out = w;
  out.kind = ModulusKind::USA;
  ComplexMatrix q = w.partner;
  q *= cplx(2.0, 0.0);
  q -= ComplexMatrix::identity(q.rows());
  out.partner = std::move(q);
  out.delta = 2.0 * w.delta;
  out.value = 2.0 * w.value;
  const FunctionSpec f = FunctionSpec::parse(out.f_id);
  out.value = witness_value(out, f);
  return out;
}

ModulusWitness witness_swap_to_usa(const ModulusWitness& w) {
  if (w.kind != ModulusKind::PLAIN)
    throw std::invalid_argument("witness_swap_to_usa: needs a PLAIN witness");
  NormalOperator big = block_diag(w.n1, w.n2);
  ModulusWitness out{ModulusKind::USA, w.f_id, w.delta, w.value, big, big,
                     swap_lift(w.n1.dim()), w.seed};
  const FunctionSpec f = FunctionSpec::parse(out.f_id);
  out.value = witness_value(out, f);
  return out;
}

ModulusWitness witness_corner(const ModulusWitness& w) {
  if (w.kind != ModulusKind::C && w.kind != ModulusKind::SA)
    throw std::invalid_argument("witness_corner: needs a C or SA witness");
  NormalOperator big = block_diag(w.n1, w.n2);
  ModulusWitness out{ModulusKind::C, w.f_id, w.delta, w.value, big, big,
                     corner_embed(w.partner), w.seed};
  const FunctionSpec f = FunctionSpec::parse(out.f_id);
  out.value = witness_value(out, f);
  return out;
}

namespace {

NormalOperator conjugate_normal(const NormalOperator& n) {
  std::vector<cplx> eigs(n.eigenvalues().size());
  for (std::size_t i = 0; i < eigs.size(); ++i) eigs[i] = std::conj(n.eigenvalues()[i]);
  return NormalOperator(std::move(eigs), conjugate_entries(n.conjugator()));
}

}  // namespace

ModulusWitness witness_conjugate(const ModulusWitness& w) {
  if (w.kind != ModulusKind::PLAIN && w.kind != ModulusKind::SA)
    throw std::invalid_argument("witness_conjugate: supported for PLAIN and SA witnesses");
  ModulusWitness out = w;
  out.f_id = "";  // the conjugated registry id is resolved by the caller
  out.n1 = conjugate_normal(w.n1);
  out.n2 = conjugate_normal(w.n2);
  if (!w.partner.empty()) out.partner = conjugate_entries(w.partner);
  return out;
}

// ---------------------------------------------------------------------------
// envelopes
// ---------------------------------------------------------------------------

ModulusEnvelope build_envelope(ModulusKind kind, const std::vector<WitnessSample>& samples,
                               const std::vector<double>& delta_grid) {
  const bool scalable = (kind == ModulusKind::SA || kind == ModulusKind::C);
  ModulusEnvelope env;
  env.kind = kind;
  env.deltas = delta_grid;
  env.values.resize(delta_grid.size(), 0.0);
  env.ratios.resize(delta_grid.size(), 0.0);
  env.provenance.resize(delta_grid.size());
  for (std::size_t i = 0; i < delta_grid.size(); ++i) {
    const double d = delta_grid[i];
    double best_v = 0.0, best_r = 0.0;
    std::string who;
    for (const auto& s : samples) {
      if (s.delta <= 0.0) continue;
      double v, rto;
      if (scalable) {
        v = s.value * std::min(1.0, d / s.delta);
        rto = s.value * std::min(1.0 / d, 1.0 / s.delta);
      } else {
        if (s.delta > d * (1.0 + 1e-12)) continue;
        v = s.value;
        rto = s.value / d;
      }
      if (v > best_v) {
        best_v = v;
        who = s.id;
      }
      best_r = std::max(best_r, rto);
    }
    env.values[i] = best_v;
    env.ratios[i] = best_r;
    env.provenance[i] = who;
  }
  return env;
}

// ---------------------------------------------------------------------------
// double operator integral
// ---------------------------------------------------------------------------

namespace {

// cluster points coinciding to 1e-12; returns cluster representatives and the
// member lists
void cluster_eigenvalues(const std::vector<cplx>& eigs, std::vector<cplx>& reps,
                         std::vector<std::vector<std::size_t>>& members) {
  reps.clear();
  members.clear();
  for (std::size_t i = 0; i < eigs.size(); ++i) {
    bool placed = false;
    for (std::size_t c = 0; c < reps.size(); ++c)
      if (std::abs(eigs[i] - reps[c]) <= 1e-12) {
        members[c].push_back(i);
        placed = true;
        break;
      }
    if (!placed) {
      reps.push_back(eigs[i]);
      members.push_back({i});
    }
  }
}

}  // namespace

ComplexMatrix doi_quasicommutator(const FunctionSpec& f, const NormalOperator& n1,
                                  const NormalOperator& n2, const ComplexMatrix& r) {
  if (r.rows() != n1.dim() || r.cols() != n2.dim())
    throw std::invalid_argument("doi_quasicommutator: dimensions not conformable");
  const ComplexMatrix t = multiply(n1.materialize(), r) - multiply(r, n2.materialize());
  // work in the joint eigenbases: tt = U1* T U2, weight entries by D0 f, map back
  const ComplexMatrix tt = multiply(adjoint(n1.conjugator()), multiply(t, n2.conjugator()));
  std::vector<cplx> reps1, reps2;
  std::vector<std::vector<std::size_t>> mem1, mem2;
  cluster_eigenvalues(n1.eigenvalues(), reps1, mem1);
  cluster_eigenvalues(n2.eigenvalues(), reps2, mem2);
  ComplexMatrix weighted(n1.dim(), n2.dim());
  for (std::size_t c1 = 0; c1 < reps1.size(); ++c1)
    for (std::size_t c2 = 0; c2 < reps2.size(); ++c2) {
      const cplx dz = reps1[c1] - reps2[c2];
      const cplx coeff =
          (std::abs(dz) <= 1e-12) ? cplx(0.0, 0.0) : (f(reps1[c1]) - f(reps2[c2])) / dz;
      for (std::size_t a : mem1[c1])
        for (std::size_t b : mem2[c2]) weighted(a, b) = coeff * tt(a, b);
    }
  return multiply(n1.conjugator(), multiply(weighted, adjoint(n2.conjugator())));
}

// ---------------------------------------------------------------------------
// searches
// ---------------------------------------------------------------------------

namespace {

std::vector<cplx> random_spectrum(std::size_t dim, double radius, Rng& rng) {
  std::vector<cplx> eigs(dim);
  for (auto& e : eigs) e = rng.disc_point(radius);
  return eigs;
}

cplx clamp_to_disc(cplx z, double radius) {
  const double a = std::abs(z);
  return (a <= radius) ? z : z * (radius / a);
}

ComplexMatrix random_partner(ModulusKind kind, std::size_t dim, Rng& rng) {
  switch (kind) {
    case ModulusKind::SA: {
      ComplexMatrix a = random_hermitian(dim, rng);
      const double na = operator_norm(a);
      if (na > 0.0) a *= cplx(1.0 / na, 0.0);
      return a;
    }
    case ModulusKind::C: {
      ComplexMatrix g(dim, dim);
      for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] = rng.complex_normal();
      const double ng = operator_norm(g);
      if (ng > 0.0) g *= cplx(1.0 / ng, 0.0);
      return g;
    }
    case ModulusKind::U: return haar_unitary(dim, rng);
    case ModulusKind::USA: {
      ComplexMatrix u = haar_unitary(dim, rng);
      const std::size_t k = 1 + rng.index(dim);
      ComplexMatrix d(dim, dim);
      for (std::size_t i = 0; i < dim; ++i) d(i, i) = (i < k) ? 1.0 : -1.0;
      return multiply(u, multiply(d, adjoint(u)));
    }
    case ModulusKind::P: {
      ComplexMatrix u = haar_unitary(dim, rng);
      const std::size_t k = 1 + rng.index(dim);
      ComplexMatrix d(dim, dim);
      for (std::size_t i = 0; i < dim; ++i) d(i, i) = (i < k) ? 1.0 : 0.0;
      return multiply(u, multiply(d, adjoint(u)));
    }
    case ModulusKind::PLAIN: return {};
  }
  return {};
}

ComplexMatrix rotate_partner(const ComplexMatrix& x, double eps, Rng& rng) {
  ComplexMatrix h = random_hermitian(x.rows(), rng);
  const double nh = operator_norm(h);
  if (nh > 0.0) h *= cplx(1.0 / nh, 0.0);
  ComplexMatrix v = unitary_exp(h, eps);
  return multiply(v, multiply(x, adjoint(v)));
}

struct Candidate {
  bool ok = false;
  double value = 0.0;
  double measured_delta = 0.0;
  NormalOperator n1{std::vector<cplx>{0.0}, ComplexMatrix::identity(1)};
  NormalOperator n2{std::vector<cplx>{0.0}, ComplexMatrix::identity(1)};
  ComplexMatrix partner;
};

Candidate evaluate_pair(ModulusKind kind, const FunctionSpec& f, double delta,
                        const NormalOperator& n1, const NormalOperator& n2,
                        ComplexMatrix partner) {
  Candidate c;
  if (kind == ModulusKind::PLAIN) {
    const double d = operator_norm(n1.materialize() - n2.materialize());
    if (!(d <= delta * (1.0 + 1e-12))) return c;
    c.ok = true;
    c.measured_delta = d;
    c.value = operator_norm(n1.apply(f) - n2.apply(f));
    c.n1 = n1;
    c.n2 = n2;
    return c;
  }
  const ComplexMatrix m1 = n1.materialize();
  const ComplexMatrix m2 = n2.materialize();
  double d = operator_norm(multiply(m1, partner) - multiply(partner, m2));
  if (kind == ModulusKind::SA || kind == ModulusKind::C) {
    // boundary rescaling: scale the contraction partner so the constraint sits
    // at delta when reachable without leaving the unit ball
    const double np = operator_norm(partner);
    if (np <= 0.0) return c;
    double s = 1.0 / np;
    if (d > 0.0) s = std::min(delta / d, 1.0 / np);
    partner *= cplx(s, 0.0);
    d *= s;
  }
  if (!(d <= delta * (1.0 + 1e-12))) return c;
  c.ok = true;
  c.measured_delta = d;
  c.value = operator_norm(multiply(n1.apply(f), partner) - multiply(partner, n2.apply(f)));
  c.n1 = n1;
  c.n2 = n2;
  c.partner = std::move(partner);
  return c;
}

}  // namespace

ModulusWitness kme_witness(const FunctionSpec& f, double delta, double disc_radius,
                           std::size_t budget, std::uint64_t seed) {
  if (!(delta > 0.0)) throw std::invalid_argument("kme_witness: delta must be positive");
  const auto& pc = fourier::psi_constant();
  const double c = pc.c + pc.quadrature_error;
  const double pitch = c * delta;
  std::vector<cplx> pts = lattice::lattice_points({pitch, disc_radius, true});
  if (pts.size() > 420) pts.resize(420);
  const std::size_t n = pts.size();
  lattice::DividedDifferenceMatrix dd = lattice::divided_difference(f, pts, pts);
  // a structured candidate helps the search on lattice instances: the kernel
  // with entries 1/conj(p)^2 realizes the Schur-product identity
  ComplexMatrix lam2(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      const cplx p = (pts[j] - pts[k]) / pitch;
      lam2(j, k) = (std::abs(p) <= 0.0) ? cplx(0.0, 0.0) : 1.0 / (std::conj(p) * std::conj(p));
    }
  schur::MultiplierEstimate lo = schur::multiplier_lower(dd.matrix, budget, seed, {lam2});
  const ComplexMatrix& b = *lo.lower_certificate;

  ComplexMatrix r(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      r(j, k) = (delta / 2.0) * (1.0 / pitch) * fourier::psi((pts[j] - pts[k]) / pitch) * b(j, k);
  // numerically enforce both constraints
  const double nr = operator_norm(r);
  if (nr > 1.0) r *= cplx(1.0 / nr, 0.0);
  NormalOperator n1 = NormalOperator::diagonal(pts);
  const ComplexMatrix m1 = n1.materialize();
  double d = operator_norm(multiply(m1, r) - multiply(r, m1));
  if (d > delta) {
    r *= cplx(delta / d, 0.0);
    d = delta;
  }
  ModulusWitness w{ModulusKind::C, f.name(), delta, 0.0, n1, n1, r, seed};
  w.f_id = f.name();
  w.value = witness_value(w, f);
  w.delta = std::max(d, witness_constraint(w));
  return w;
}

ModulusWitness modulus_search(ModulusKind kind, const FunctionSpec& f, double delta,
                              const SearchConfig& cfg) {
  if (cfg.dim < 1) throw std::invalid_argument("modulus_search: dim must be >= 1");
  if (!(delta > 0.0) && kind != ModulusKind::PLAIN)
    throw std::invalid_argument("modulus_search: delta must be positive for commutator kinds");
  if (!(delta > 0.0)) throw std::invalid_argument("modulus_search: delta must be positive");

  Candidate best;
  best.value = -1.0;

  auto consider = [&](const Candidate& c) {
    if (c.ok && c.value > best.value) best = c;
  };

  for (std::size_t t = 0; t < cfg.budget; ++t) {
    Rng rng = Rng(cfg.seed).substream(t);
    const bool fresh = best.value < 0.0 || rng.uniform() < 0.5;
    if (kind == ModulusKind::PLAIN) {
      if (fresh) {
        std::vector<cplx> eigs = random_spectrum(cfg.dim, cfg.disc_radius, rng);
        ComplexMatrix u = haar_unitary(cfg.dim, rng);
        NormalOperator n1(eigs, u);
        // eigenvalue shift on the same frame keeps the difference norm exact
        std::vector<cplx> shifted(eigs.size());
        for (std::size_t i = 0; i < eigs.size(); ++i) {
          cplx step = rng.complex_normal();
          const double a = std::abs(step);
          if (a > 0.0) step *= delta / a;
          shifted[i] = clamp_to_disc(eigs[i] + step, cfg.disc_radius);
        }
        NormalOperator n2(shifted, u);
        consider(evaluate_pair(kind, f, delta, n1, n2, {}));
      } else {
        // perturb the incumbent pair: rotate the joint frame and jitter spectra
        const double eps = 0.2 * rng.uniform();
        ComplexMatrix h = random_hermitian(cfg.dim, rng);
        const double nh = operator_norm(h);
        if (nh > 0.0) h *= cplx(1.0 / nh, 0.0);
        ComplexMatrix v = unitary_exp(h, eps);
        auto jitter = [&](const NormalOperator& n) {
          std::vector<cplx> eigs = n.eigenvalues();
          for (auto& e : eigs)
            e = clamp_to_disc(e + 0.1 * delta * rng.complex_normal(), cfg.disc_radius);
          return NormalOperator(eigs, multiply(v, n.conjugator()));
        };
        consider(evaluate_pair(kind, f, delta, jitter(best.n1), jitter(best.n2), {}));
      }
      continue;
    }
    if (fresh) {
      NormalOperator n1(random_spectrum(cfg.dim, cfg.disc_radius, rng),
                        haar_unitary(cfg.dim, rng));
      consider(evaluate_pair(kind, f, delta, n1, n1, random_partner(kind, cfg.dim, rng)));
    } else {
      std::vector<cplx> eigs = best.n1.eigenvalues();
      for (auto& e : eigs)
        e = clamp_to_disc(e + 0.1 * delta * rng.complex_normal(), cfg.disc_radius);
      const double eps = 0.2 * rng.uniform();
      ComplexMatrix h = random_hermitian(cfg.dim, rng);
      const double nh = operator_norm(h);
      if (nh > 0.0) h *= cplx(1.0 / nh, 0.0);
      NormalOperator n1(eigs, multiply(unitary_exp(h, eps), best.n1.conjugator()));
      ComplexMatrix partner =
          best.partner.empty() ? random_partner(kind, cfg.dim, rng)
                               : rotate_partner(best.partner, 0.2 * rng.uniform(), rng);
      if (kind == ModulusKind::SA || kind == ModulusKind::C) {
        const double np = operator_norm(partner);
        if (np > 0.0) partner *= cplx(1.0 / np, 0.0);
      }
      consider(evaluate_pair(kind, f, delta, n1, n1, std::move(partner)));
    }
  }

  if (best.value < 0.0)
    throw validation_error("modulus_search: no feasible instance found within budget");
  ModulusWitness w{kind, f.name(), delta, best.value, best.n1, best.n2, best.partner, cfg.seed};
  w.delta = std::max(best.measured_delta, witness_constraint(w));
  return w;
}

// ---------------------------------------------------------------------------
// two-sided bounds
// ---------------------------------------------------------------------------

double net_upper_bound(const FunctionSpec& f, double disc_radius, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("net_upper_bound: delta must be positive");
  const double omega_half = f.modulus_upper(0.5 * delta, disc_radius);
  double cl_bound;
  if (auto a = f.linear_coefficient()) {
    // the divided difference of a*z + b is the constant a; the diagonal can be
    // completed to a as well since commutators vanish on spectral diagonals
    cl_bound = std::abs(*a);
  } else if (f.is_conjugate()) {
    cl_bound = lattice::conj_upper_bound({delta / 3.0, disc_radius, true});
  } else {
    std::vector<cplx> pts = lattice::lattice_points({delta / 3.0, disc_radius, true});
    if (pts.size() <= 260) {
      lattice::DividedDifferenceMatrix dd = lattice::divided_difference(f, pts, pts);
      schur::MultiplierEstimate hi = schur::multiplier_upper(dd.matrix, 30, 17);
      cl_bound = hi.upper;
    } else {
      cl_bound = lattice::separated_set_bound(f, pts, delta / 3.0);
    }
  }
  return 2.0 * omega_half + 2.0 * delta * cl_bound;
}

double kme_lower_bound(const FunctionSpec& f, const std::vector<cplx>& lam,
                       const std::vector<cplx>& mu, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("kme_lower_bound: delta must be positive");
  const auto& pc = fourier::psi_constant();
  const double c = pc.c + pc.quadrature_error;
  for (const auto& a : lam)
    for (const auto& b : mu) {
      const double d = std::abs(a - b);
      if (d > 0.0 && d < c * delta * (1.0 - 1e-12)) {
        std::ostringstream os;
        os << "kme_lower_bound: separation hypothesis fails for (" << a.real() << "," << a.imag()
           << ") and (" << b.real() << "," << b.imag() << "): distance " << d << " < c*delta = "
           << c * delta;
        throw std::invalid_argument(os.str());
      }
    }
  double radius = 0.0;
  for (const auto& a : lam) radius = std::max(radius, std::abs(a));
  for (const auto& b : mu) radius = std::max(radius, std::abs(b));
  const double omega_term = f.modulus_lower(delta, std::max(radius, delta));
  lattice::DividedDifferenceMatrix dd = lattice::divided_difference(f, lam, mu);
  schur::MultiplierEstimate lo = schur::multiplier_lower(dd.matrix, 24, 5);
  return std::max(omega_term, 0.5 * delta * lo.lower);
}

double kme_lower_conj_lattice(double disc_radius, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("kme_lower_conj_lattice: delta must be positive");
  const auto& pc = fourier::psi_constant();
  const double c = pc.c + pc.quadrature_error;
  const double pitch = c * delta;
  // D0 conj is scale invariant, so the multiplier lower bound on the pitch
  // lattice inside rD equals the integer-lattice bound at radius r/pitch
  const double r_scaled = disc_radius / pitch;
  const double omega_term = std::min(delta, 2.0 * disc_radius);
  if (r_scaled < 3.0) return omega_term;
  const double mult = lattice::conj_lattice_multiplier_lower(r_scaled);
  return std::max(omega_term, 0.5 * delta * mult);
}

DilationReport mcc_sandwich_check(const FunctionSpec& f, std::size_t instances,
                                  std::size_t dim_cap, std::uint64_t seed) {
  DilationReport rep;
  rep.instances = instances;
  const double tau = 0.5;
  const double slack = 1e-8;
  const double factor = tau + tau * tau / std::sqrt(1.0 - tau * tau);
  for (std::size_t t = 0; t < instances; ++t) {
    Rng rng = Rng(seed).substream(t);
    const std::size_t dim = 1 + rng.index(dim_cap);
    NormalOperator n(random_spectrum(dim, 1.0, rng), haar_unitary(dim, rng));
    ComplexMatrix a = random_hermitian(dim, rng);
    const double na = operator_norm(a);
    if (na <= 0.0) continue;
    a *= cplx(1.0 / na, 0.0);
    ComplexMatrix u = unitary_dilation(a, tau);
    NormalOperator nn = block_diag(n, n);
    const ComplexMatrix nm = nn.materialize();
    const ComplexMatrix fm = nn.apply(f);
    const ComplexMatrix m = n.materialize();
    const ComplexMatrix fn = n.apply(f);
    const double comm_na = operator_norm(multiply(m, a) - multiply(a, m));
    const double comm_fa = operator_norm(multiply(fn, a) - multiply(a, fn));
    const double lifted_comm = operator_norm(multiply(nm, u) - multiply(u, nm));
    const double lifted_val = operator_norm(multiply(fm, u) - multiply(u, fm));
    const double slack1 = lifted_comm - (factor * comm_na + slack);
    if (slack1 > 0.0) {
      ++rep.commutator_violations;
      rep.max_commutator_slack = std::max(rep.max_commutator_slack, slack1);
    }
    const double slack2 = (tau * comm_fa - slack) - lifted_val;
    if (slack2 > 0.0) {
      ++rep.value_violations;
      rep.max_value_slack = std::max(rep.max_value_slack, slack2);
    }
  }
  return rep;
}

VlReport vl_check(std::size_t instances, std::size_t dim_cap, std::uint64_t seed) {
  VlReport rep;
  rep.instances = instances;
  for (std::size_t t = 0; t < instances; ++t) {
    Rng rng = Rng(seed ^ 0x76a1ULL).substream(t);
    const std::size_t dim = 1 + rng.index(dim_cap);
    ComplexMatrix tm = random_hermitian(dim, rng);
    const double nt = operator_norm(tm);
    if (nt <= 0.0) continue;
    tm *= cplx(0.9 * rng.uniform(0.3, 1.0) / nt, 0.0);
    ComplexMatrix x(dim, dim);
    for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = rng.complex_normal();
    ComplexMatrix t2 = multiply(tm, tm);
    ComplexMatrix s = sqrt_psd(ComplexMatrix::identity(dim) - t2);
    const double lhs = operator_norm(multiply(s, x) - multiply(x, s));
    const double ntm = operator_norm(tm);
    const double comm = operator_norm(multiply(x, tm) - multiply(tm, x));
    const double rhs = ntm * comm / std::sqrt(1.0 - ntm * ntm) + 1e-8;
    if (lhs > rhs) {
      ++rep.violations;
      rep.max_slack = std::max(rep.max_slack, lhs - rhs);
    }
  }
  return rep;
}

}  // namespace opmod::moduli
