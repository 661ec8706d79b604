#ifndef OPMOD_LATTICE_HPP
#define OPMOD_LATTICE_HPP

//
// Module      : lattice
// Description : divided differences on complex-integer lattices, the
//               two-sided log(2r/delta) machinery, the ten-cell partition
//

#include <vector>

#include "opmod/complex_matrix.hpp"
#include "opmod/function_spec.hpp"
#include "opmod/linalg.hpp"

namespace opmod::lattice {

struct LatticeSpec {
  double delta = 1.0;  // pitch
  double r = 1.0;      // disc radius
  bool closed = true;  // |z| <= r (default) vs |z| < r
};

// delta(m + i n) inside the disc, sorted by (|z|, arg z, Re z); 0 is always
// included
std::vector<cplx> lattice_points(const LatticeSpec& spec);

struct DividedDifferenceMatrix {
  std::vector<cplx> points_row;
  std::vector<cplx> points_col;
  ComplexMatrix matrix;  // (f(z_j) - f(w_k)) / (z_j - w_k), 0 on coincidences
};

DividedDifferenceMatrix divided_difference(const FunctionSpec& f,
                                           const std::vector<cplx>& rows,
                                           const std::vector<cplx>& cols);
// serial reference for the row-parallel assembly kernel
DividedDifferenceMatrix divided_difference_serial(const FunctionSpec& f,
                                                  const std::vector<cplx>& rows,
                                                  const std::vector<cplx>& cols);

// Matrix {g(p_j - p_k)} over Z^2 cap rD with FFT-convolution matvec.
class LatticeToeplitz {
 public:
  LatticeToeplitz(double r, std::function<cplx(long long, long long)> kernel);

  std::size_t size() const { return pts_.size(); }
  const std::vector<std::pair<long long, long long>>& points() const { return pts_; }
  LinearOperator as_operator() const;

 private:
  void matvec(const cplx* x, cplx* y, bool adjoint) const;

  std::vector<std::pair<long long, long long>> pts_;
  long long bound_ = 0;
  std::size_t fft_n_ = 0;
  std::vector<cplx> kernel_hat_;
  std::vector<cplx> kernel_adj_hat_;
};

struct NizBound {
  double lambda_r_norm_lb = 0.0;  // (sum of entries of Lambda_r) / n
  double lambda2_norm_ub = 0.0;   // ||{1/conj(m-n)^2}|| plus a relative margin
  double bound = 0.0;             // valid lower bound for ||D0 conj||_M on the lattice
  std::size_t points = 0;
};

// Theorem-level lower bound machinery at pitch 1; requires r >= 3.
NizBound niz_lower_bound(double r);

// Stronger certified lower bound ||Lambda_r|| / ||Lambda^{[2]}|| with both
// norms evaluated matrix-free.
double conj_lattice_multiplier_lower(double r);

// sum_{j != k} 1/|p_j - p_k|^2 over Z^2 cap rD; row-parallel with a
// deterministic serial reduction
double lambda_pair_sum(double r);
double lambda_pair_sum_serial(double r);

// Certified upper bound for ||D0 conj||_M on delta Z^2 cap rD via the dyadic
// annulus function; scales like log(2r/delta).
double conj_upper_bound(const LatticeSpec& spec);

// Borel partition of C^2 subordinate to the diagonal: cells 1..9 cover a
// neighbourhood of the diagonal, cell 0 the rest. Offsets are enumerated in
// the fixed order (0,0),(1,0),(-1,0),(0,1),(0,-1),(1,1),(1,-1),(-1,1),(-1,-1).
int partition_cell(double a, cplx z, cplx w);

// ||D0 f||_M <= 2 ||Psi||_{L1-hat} sup|f| / delta on a delta-separated set;
// verifies the separation hypothesis first.
double separated_set_bound(const FunctionSpec& f, const std::vector<cplx>& points,
                           double delta);

}  // namespace opmod::lattice

#endif
