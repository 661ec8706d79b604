#ifndef OPMOD_MODULI_HPP
#define OPMOD_MODULI_HPP

//
// Module      : moduli
// Description : operator and commutator moduli of continuity as search
//               problems, double operator integrals, omega transforms,
//               witness algebra and envelopes
//

#include <cstdint>
#include <string>
#include <vector>

#include "opmod/complex_matrix.hpp"
#include "opmod/function_spec.hpp"
#include "opmod/linalg.hpp"

namespace opmod::moduli {

// ---------------------------------------------------------------------------
// scalar moduli of continuity and their integral transforms
// ---------------------------------------------------------------------------

class ModulusSpec {
 public:
  enum class Kind { Power, Linear, BoundedPower, Table };

  static ModulusSpec power(double alpha);  // t^alpha, 0 < alpha < 1
  static ModulusSpec linear();             // t
  static ModulusSpec bounded_power(double alpha, double cap);  // min(t^alpha, cap)
  static ModulusSpec table(std::vector<double> ts, std::vector<double> ws);

  double operator()(double t) const;
  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double cap() const { return cap_; }
  std::string name() const;

  // spot checks of the modulus-of-continuity axioms on a sample grid
  bool check_axioms(double tmax, std::size_t samples = 128) const;

 private:
  Kind kind_ = Kind::Linear;
  double alpha_ = 1.0;
  double cap_ = 0.0;
  std::vector<double> ts_, ws_;
};

// omega_* (order 1) and omega_** (order 2); +infinity when the integral
// diverges. Closed forms for power moduli, adaptive quadrature with a
// constant-extension tail otherwise.
double omega_transform(const ModulusSpec& omega, double delta, int order);

// quadrature path regardless of closed forms (oracle cross-checks)
double omega_transform_quadrature(const ModulusSpec& omega, double delta, int order);

// ---------------------------------------------------------------------------
// witnesses
// ---------------------------------------------------------------------------

enum class ModulusKind { PLAIN, SA, C, U, USA, P };

std::string kind_name(ModulusKind k);
ModulusKind kind_from_name(const std::string& s);

// A concrete lower-bound record for one of the moduli: operators, constraint
// level and achieved value. For PLAIN the partner is absent and the
// constraint is ||N1 - N2||; for the commutator kinds the constraint is
// ||N1 X - X N2|| with N2 = N1 in the classical single-operator form.
struct ModulusWitness {
  ModulusKind kind = ModulusKind::PLAIN;
  std::string f_id;      // parseable registry id
  double delta = 0.0;    // claimed constraint level
  double value = 0.0;    // achieved norm
  NormalOperator n1;
  NormalOperator n2;
  ComplexMatrix partner;  // empty for PLAIN
  std::uint64_t seed = 0;
};

double witness_constraint(const ModulusWitness& w);
double witness_value(const ModulusWitness& w, const FunctionSpec& f);

// class membership of the partner, constraint <= delta + tol, stored value
// reproducible to 1e-9; throws validation_error otherwise
void validate_witness(const ModulusWitness& w);

// scaling closure (Theorem-41-style): partner, constraint and value all scale
// by tau; only the contraction kinds SA and C admit it
ModulusWitness witness_scale(const ModulusWitness& w, double tau);

// P-witness at delta <-> USA-witness at 2 delta with doubled value (Q = 2P-I)
ModulusWitness witness_p_to_usa(const ModulusWitness& w);

// PLAIN pair -> USA witness of equal value via the swap lift
ModulusWitness witness_swap_to_usa(const ModulusWitness& w);

// two-normal quasicommutator -> single-operator commutator of the same value
// via the corner embedding (kinds C and SA pass through as C)
ModulusWitness witness_corner(const ModulusWitness& w);

// entrywise conjugation of all data: a witness for conj(f) of equal value
// (PLAIN and SA kinds)
ModulusWitness witness_conjugate(const ModulusWitness& w);

// ---------------------------------------------------------------------------
// envelopes
// ---------------------------------------------------------------------------

struct WitnessSample {
  double delta = 0.0;  // measured constraint
  double value = 0.0;
  std::string id;
};

// Lower-bound envelope over a delta grid. For SA/C the scaling closure
// v * min(1, delta/d_i) applies; other kinds get only the monotone closure
// max over d_i <= delta. values[] is nondecreasing and ratios[] (value/delta)
// nonincreasing exactly as floating-point sequences by construction.
struct ModulusEnvelope {
  ModulusKind kind = ModulusKind::PLAIN;
  std::vector<double> deltas;
  std::vector<double> values;
  std::vector<double> ratios;
  std::vector<std::string> provenance;
};

ModulusEnvelope build_envelope(ModulusKind kind, const std::vector<WitnessSample>& samples,
                               const std::vector<double>& delta_grid);

// ---------------------------------------------------------------------------
// double operator integral
// ---------------------------------------------------------------------------

// Finite-dimensional Birman-Solomyak sum over spectral projections
//   sum_{l,m} (D0 f)(lambda_l, mu_m) P_l (N1 R - R N2) Q_m,
// which equals f(N1) R - R f(N2) exactly. Eigenvalues within 1e-12 are
// clustered to one projection.
ComplexMatrix doi_quasicommutator(const FunctionSpec& f, const NormalOperator& n1,
                                  const NormalOperator& n2, const ComplexMatrix& r);

// ---------------------------------------------------------------------------
// searches and two-sided bounds
// ---------------------------------------------------------------------------

struct SearchConfig {
  double disc_radius = 1.0;  // spectra constrained to clos(rD)
  std::size_t dim = 4;
  std::size_t budget = 200;
  std::uint64_t seed = 1;
};

// best witness found by seeded random generation plus local perturbations;
// a valid lower bound for the modulus at delta, deterministic per seed
ModulusWitness modulus_search(ModulusKind kind, const FunctionSpec& f, double delta,
                              const SearchConfig& cfg);

// the Psi-kernel witness of Theorem kme-: N1, N2 diagonal on c*delta-separated
// lattices, partner from a multiplier lower certificate for D0 f
ModulusWitness kme_witness(const FunctionSpec& f, double delta, double disc_radius,
                           std::size_t budget, std::uint64_t seed);

// 2 omega_f(delta/2) + 2 delta ||f||_CL(net) with the (delta/3)-pitch lattice
// net; a certified upper bound for the C-modulus at delta
double net_upper_bound(const FunctionSpec& f, double disc_radius, double delta);

// max(omega_f(delta), (delta/2) ||D0 f||_{M, lower}) under the c*delta
// separation hypothesis; throws when the hypothesis fails
double kme_lower_bound(const FunctionSpec& f, const std::vector<cplx>& lam,
                       const std::vector<cplx>& mu, double delta);

// the conj(z) instance on the c*delta lattice inside rD, evaluated through
// the matrix-free Toeplitz route
double kme_lower_conj_lattice(double disc_radius, double delta);

struct DilationReport {
  std::size_t instances = 0;
  std::size_t commutator_violations = 0;  // ||NU-UN|| bound failures
  std::size_t value_violations = 0;       // lower bound failures
  double max_commutator_slack = 0.0;
  double max_value_slack = 0.0;
};

// tau = 1/2 dilation checks behind the SA <= 2*PLAIN sandwich
DilationReport mcc_sandwich_check(const FunctionSpec& f, std::size_t instances,
                                  std::size_t dim_cap, std::uint64_t seed);

struct VlReport {
  std::size_t instances = 0;
  std::size_t violations = 0;
  double max_slack = 0.0;
};

// the commutator square-root inequality with ||T|| <= 0.9
VlReport vl_check(std::size_t instances, std::size_t dim_cap, std::uint64_t seed);

}  // namespace opmod::moduli

#endif
