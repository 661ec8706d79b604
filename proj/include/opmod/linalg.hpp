#ifndef OPMOD_LINALG_HPP
#define OPMOD_LINALG_HPP

//
// Module      : linalg
// Description : operator norms, Hermitian eigensolver, normal operators in
//               spectral form, functional calculus, block lifts
//

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "opmod/complex_matrix.hpp"
#include "opmod/rng.hpp"

namespace opmod {

class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Membership checks use a single global tolerance on the defect norm,
// relative to 1 + ||M||.
inline constexpr double kMembershipTol = 1e-10;

// ---------------------------------------------------------------------------
// operator norm
// ---------------------------------------------------------------------------

// Largest singular value. Power iteration on M*M from the normalized all-ones
// vector (tolerance 1e-12 on the Rayleigh-quotient change, cap 10000
// iterations), confirmed from a second fixed pseudorandom start; falls back to
// the Jacobi eigensolver on M*M if the iteration does not converge.
double operator_norm(const ComplexMatrix& m);

// Matrix-free variant for structured operators (e.g. lattice Toeplitz
// kernels). apply/apply_adjoint write y = Mx resp. y = M*x.
struct LinearOperator {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::function<void(const cplx*, cplx*)> apply;
  std::function<void(const cplx*, cplx*)> apply_adjoint;
};

// Two-sided bracket of the largest singular value from Golub-Kahan-Lanczos
// bidiagonalization with full reorthogonalization. lower is always a certified
// lower bound (a Ritz value); upper adds the estimated remaining gap plus a
// relative margin and is the value to use when dividing by the norm.
struct NormRange {
  double lower = 0.0;
  double upper = 0.0;
  bool converged = false;
};
NormRange operator_norm_range(const LinearOperator& op, std::size_t max_iter = 150);

// ---------------------------------------------------------------------------
// dense factorizations
// ---------------------------------------------------------------------------

// Cyclic complex Jacobi for Hermitian input; eigenvalues ascending,
// H = V diag(w) V*.
void hermitian_eig(const ComplexMatrix& h, std::vector<double>& w, ComplexMatrix& v);

struct Svd {
  ComplexMatrix u;                 // columns for singular values above cutoff
  std::vector<double> sigma;       // descending
  ComplexMatrix v;
};
// SVD via the Jacobi eigensolver on M*M; u holds columns only for singular
// values above cutoff_rel * sigma_max (partial isometry).
Svd svd_jacobi(const ComplexMatrix& m, double cutoff_rel = 1e-13);

// Householder QR; q is square unitary, r upper triangular with the same shape
// as the input.
void qr_decompose(const ComplexMatrix& m, ComplexMatrix& q, ComplexMatrix& r);

// QR of a Ginibre sample with the diagonal-phase fix.
ComplexMatrix haar_unitary(std::size_t n, Rng& rng);

ComplexMatrix random_hermitian(std::size_t n, Rng& rng);

// f applied to a Hermitian matrix through its eigendecomposition.
ComplexMatrix hermitian_calculus(const ComplexMatrix& h,
                                 const std::function<double(double)>& f);

// (principal square root of a PSD Hermitian matrix; eigenvalues clamped at 0)
ComplexMatrix sqrt_psd(const ComplexMatrix& h);

// exp(i t H) for Hermitian H
ComplexMatrix unitary_exp(const ComplexMatrix& h, double t);

// ---------------------------------------------------------------------------
// normal operators in spectral form
// ---------------------------------------------------------------------------

class FunctionSpec;  // function_spec.hpp

class NormalOperator {
 public:
  // Requires a unitary conjugator: ||U*U - I|| <= 1e-10, else throws
  // validation_error carrying the defect norm.
  NormalOperator(std::vector<cplx> eigenvalues, ComplexMatrix conjugator);

  static NormalOperator diagonal(std::vector<cplx> eigenvalues);

  std::size_t dim() const { return eigenvalues_.size(); }
  const std::vector<cplx>& eigenvalues() const { return eigenvalues_; }
  const ComplexMatrix& conjugator() const { return conjugator_; }

  ComplexMatrix materialize() const;              // U diag(lambda) U*
  ComplexMatrix apply(const FunctionSpec& f) const;  // U diag(f(lambda)) U*
  NormalOperator adjoint_op() const;
  double spectral_radius() const;

 private:
  std::vector<cplx> eigenvalues_;
  ComplexMatrix conjugator_;
};

ComplexMatrix apply_function(const FunctionSpec& f, const NormalOperator& n);

// ---------------------------------------------------------------------------
// operator classes
// ---------------------------------------------------------------------------

enum class OperatorClass { SA, U, USA, P, CONTRACTION, ANY };

bool is_member(const ComplexMatrix& m, OperatorClass cls, double tol = kMembershipTol);
double membership_defect(const ComplexMatrix& m, OperatorClass cls);
std::string class_name(OperatorClass cls);

// ---------------------------------------------------------------------------
// block lifts
// ---------------------------------------------------------------------------

// diag(N1, N2), still in spectral form
NormalOperator block_diag(const NormalOperator& n1, const NormalOperator& n2);

// [[0, R], [R*, 0]], self-adjoint
ComplexMatrix antidiag_sym(const ComplexMatrix& r);

// [[0, R], [0, 0]]
ComplexMatrix corner_embed(const ComplexMatrix& r);

// [[0, I], [I, 0]]
ComplexMatrix swap_lift(std::size_t n);

// [[tau A, S], [-S, tau A]] with S = (I - tau^2 A^2)^{1/2}; requires A
// self-adjoint and ||tau A|| < 1, and verifies unitarity of the result.
ComplexMatrix unitary_dilation(const ComplexMatrix& a, double tau);

}  // namespace opmod

#endif
