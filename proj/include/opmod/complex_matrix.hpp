#ifndef OPMOD_COMPLEX_MATRIX_HPP
#define OPMOD_COMPLEX_MATRIX_HPP

//
// Module      : complex_matrix
// Description : dense complex matrices, row-major, with OpenMP product kernels
//

#include <complex>
#include <cstddef>
#include <vector>

namespace opmod {

using cplx = std::complex<double>;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols) {}
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zero(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static ComplexMatrix diagonal(const std::vector<cplx>& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return a_.size(); }
  bool empty() const { return a_.empty(); }
  bool is_square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  cplx* data() { return a_.data(); }
  const cplx* data() const { return a_.data(); }
  const std::vector<cplx>& entries() const { return a_; }

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(cplx scalar);

  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> a_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx scalar, ComplexMatrix a);

// Parallel kernel; rows are independent, so the result is identical to the
// serial reference for any thread count.
ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix multiply_serial(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix adjoint(const ComplexMatrix& m);
ComplexMatrix transpose(const ComplexMatrix& m);
ComplexMatrix conjugate_entries(const ComplexMatrix& m);

// [[a, b], [c, d]] with conformable blocks
ComplexMatrix block2x2(const ComplexMatrix& a, const ComplexMatrix& b,
                       const ComplexMatrix& c, const ComplexMatrix& d);

// y = m x and y = m* x on raw vectors (no allocation)
void matvec(const ComplexMatrix& m, const cplx* x, cplx* y);
void matvec_adjoint(const ComplexMatrix& m, const cplx* x, cplx* y);

}  // namespace opmod

#endif
