#include "opmod/complex_matrix.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace opmod {

namespace {
constexpr std::size_t kParallelFlopCutoff = 1u << 16;
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
  if (a_.size() != rows_ * cols_)
    throw std::invalid_argument("ComplexMatrix: entry count does not match rows*cols");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<cplx>& d) {
  ComplexMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw std::invalid_argument("matrix addition: shape mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += other.a_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw std::invalid_argument("matrix subtraction: shape mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= other.a_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx scalar) {
  for (auto& v : a_) v *= scalar;
  return *this;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : a_) s += std::norm(v);
  return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
  double s = 0.0;
  for (const auto& v : a_) s = std::max(s, std::abs(v));
  return s;
}

bool ComplexMatrix::all_finite() const {
  for (const auto& v : a_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(cplx scalar, ComplexMatrix a) { return a *= scalar; }

ComplexMatrix multiply_serial(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: inner dimension mismatch");
  ComplexMatrix c(a.rows(), b.cols());
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  for (std::size_t i = 0; i < n; ++i) {
    cplx* ci = c.data() + i * m;
    for (std::size_t l = 0; l < k; ++l) {
      const cplx ail = a(i, l);
      const cplx* bl = b.data() + l * m;
      for (std::size_t j = 0; j < m; ++j) ci[j] += ail * bl[j];
    }
  }
  return c;
}

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: inner dimension mismatch");
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  if (n * k * m < kParallelFlopCutoff) return multiply_serial(a, b);
  ComplexMatrix c(n, m);
#pragma omp parallel for schedule(static)
  for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    cplx* ci = c.data() + i * m;
    for (std::size_t l = 0; l < k; ++l) {
      const cplx ail = a(i, l);
      const cplx* bl = b.data() + l * m;
      for (std::size_t j = 0; j < m; ++j) ci[j] += ail * bl[j];
    }
  }
  return c;
}

ComplexMatrix adjoint(const ComplexMatrix& m) {
  ComplexMatrix r(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(j, i) = std::conj(m(i, j));
  return r;
}

ComplexMatrix transpose(const ComplexMatrix& m) {
  ComplexMatrix r(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(j, i) = m(i, j);
  return r;
}

ComplexMatrix conjugate_entries(const ComplexMatrix& m) {
  ComplexMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = std::conj(m(i, j));
  return r;
}

ComplexMatrix block2x2(const ComplexMatrix& a, const ComplexMatrix& b,
                       const ComplexMatrix& c, const ComplexMatrix& d) {
  if (a.rows() != b.rows() || c.rows() != d.rows() || a.cols() != c.cols() ||
      b.cols() != d.cols())
    throw std::invalid_argument("block2x2: blocks are not conformable");
  ComplexMatrix r(a.rows() + c.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) r(i, a.cols() + j) = b(i, j);
  }
  for (std::size_t i = 0; i < c.rows(); ++i) {
    for (std::size_t j = 0; j < c.cols(); ++j) r(a.rows() + i, j) = c(i, j);
    for (std::size_t j = 0; j < d.cols(); ++j) r(a.rows() + i, a.cols() + j) = d(i, j);
  }
  return r;
}

void matvec(const ComplexMatrix& m, const cplx* x, cplx* y) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    cplx s = 0.0;
    const cplx* row = m.data() + i * m.cols();
    for (std::size_t j = 0; j < m.cols(); ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

void matvec_adjoint(const ComplexMatrix& m, const cplx* x, cplx* y) {
  for (std::size_t j = 0; j < m.cols(); ++j) y[j] = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const cplx* row = m.data() + i * m.cols();
    const cplx xi = x[i];
    for (std::size_t j = 0; j < m.cols(); ++j) y[j] += std::conj(row[j]) * xi;
  }
}

}  // namespace opmod
