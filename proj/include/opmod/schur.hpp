#ifndef OPMOD_SCHUR_HPP
#define OPMOD_SCHUR_HPP

//
// Module      : schur
// Description : Schur-Hadamard products and certified two-sided estimates of
//               the finite Schur multiplier norm
//

#include <limits>
#include <optional>
#include <vector>

#include "opmod/complex_matrix.hpp"
#include "opmod/linalg.hpp"

namespace opmod::schur {

ComplexMatrix schur_product(const ComplexMatrix& a, const ComplexMatrix& b);

// Finite Haagerup-style factorization phi_jk = <x_j, y_k>. Row j of x is x_j,
// row k of y is y_k, so phi = x * adjoint(y).
struct Factorization {
  ComplexMatrix x;  // m x d
  ComplexMatrix y;  // n x d

  double max_row_norm_x() const;
  double max_row_norm_y() const;
  // the certified upper bound: max_j ||x_j|| * max_k ||y_k||
  double value() const;
  // max entrywise |x y* - phi|
  double residual(const ComplexMatrix& phi) const;
  // scale so the two max row norms agree; value is unchanged
  void rebalance();
};

struct MultiplierEstimate {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  std::optional<ComplexMatrix> lower_certificate;  // test matrix B, ||B|| <= 1
  std::optional<Factorization> upper_certificate;  // absent when upper = inf
};

// Lower bound by seeded random test matrices plus alternating singular-vector
// ascent (60/40 budget split); extra deterministic candidates may be supplied
// and are always evaluated. Deterministic for fixed seed.
MultiplierEstimate multiplier_lower(const ComplexMatrix& phi, std::size_t budget,
                                    std::uint64_t seed,
                                    const std::vector<ComplexMatrix>& candidates = {});

// Upper bound through a verified factorization: structural routes for 0/1
// block patterns and their complements, then alternating least squares from
// SVD/identity/random initializations. No certificate within the residual
// tolerance leaves upper = +infinity.
MultiplierEstimate multiplier_upper(const ComplexMatrix& phi, std::size_t iterations,
                                    std::uint64_t seed);

// Both sides in one record (lower <= upper up to tolerance by construction).
MultiplierEstimate estimate(const ComplexMatrix& phi, std::size_t budget,
                            std::size_t iterations, std::uint64_t seed);

struct ToeplitzAtom {
  cplx weight;
  cplx frequency;
};

struct ToeplitzBound {
  double bound = 0.0;         // sum of |weights|
  ComplexMatrix phi;          // phi_jk = sum_m c_m e^{-i Re((z_j - w_k) conj(zeta_m))}
  Factorization certificate;  // reproduces phi with value == bound
};

ToeplitzBound toeplitz_upper(const std::vector<cplx>& points_z,
                             const std::vector<cplx>& points_w,
                             const std::vector<ToeplitzAtom>& atoms);

// certificate algebra
Factorization stack(Factorization a, Factorization b);          // phi_a + phi_b
Factorization tensor_schur(const Factorization& a, const Factorization& b);  // phi_a * phi_b entrywise
Factorization scale(Factorization f, cplx c);
// estimate for transpose(phi) carried over by conjugating certificates
MultiplierEstimate flip(const MultiplierEstimate& est);

// throws validation_error if any stored certificate fails its invariant
void validate(const MultiplierEstimate& est, const ComplexMatrix& phi);

}  // namespace opmod::schur

#endif
