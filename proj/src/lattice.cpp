#include "opmod/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "../src/fft_utils.hpp"
#include "opmod/fourier.hpp"

namespace opmod::lattice {

namespace {

constexpr double kPi = 3.141592653589793238462643383280;

void fft2(std::vector<cplx>& data, std::size_t n, int sign) {
  detail::fft2_cached(data.data(), n, sign);
}

}  // namespace

std::vector<cplx> lattice_points(const LatticeSpec& spec) {
  if (!(spec.delta > 0.0) || !(spec.r > 0.0))
    throw std::invalid_argument("lattice_points: delta and r must be positive");
  const long long m = static_cast<long long>(std::floor(spec.r / spec.delta)) + 1;
  std::vector<cplx> pts;
  for (long long a = -m; a <= m; ++a)
    for (long long b = -m; b <= m; ++b) {
      const cplx z(spec.delta * static_cast<double>(a), spec.delta * static_cast<double>(b));
      const double az = std::abs(z);
      if (spec.closed ? az <= spec.r * (1.0 + 1e-12) : az < spec.r * (1.0 - 1e-12)) pts.push_back(z);
    }
  std::sort(pts.begin(), pts.end(), [](const cplx& x, const cplx& y) {
    const double ax = std::abs(x), ay = std::abs(y);
    if (ax != ay) return ax < ay;
    const double gx = std::arg(x), gy = std::arg(y);
    if (gx != gy) return gx < gy;
    return x.real() < y.real();
  });
  return pts;
}

namespace {

DividedDifferenceMatrix assemble_dd(const FunctionSpec& f, const std::vector<cplx>& rows,
                                    const std::vector<cplx>& cols, bool parallel) {
  DividedDifferenceMatrix out;
  out.points_row = rows;
  out.points_col = cols;
  out.matrix = ComplexMatrix(rows.size(), cols.size());
  std::vector<cplx> frow(rows.size()), fcol(cols.size());
  for (std::size_t j = 0; j < rows.size(); ++j) frow[j] = f(rows[j]);
  for (std::size_t k = 0; k < cols.size(); ++k) fcol[k] = f(cols[k]);
  auto fill_row = [&](std::size_t j) {
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const cplx dz = rows[j] - cols[k];
      out.matrix(j, k) = (dz == cplx(0.0, 0.0)) ? cplx(0.0, 0.0) : (frow[j] - fcol[k]) / dz;
    }
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long long j = 0; j < static_cast<long long>(rows.size()); ++j)
      fill_row(static_cast<std::size_t>(j));
  } else {
    for (std::size_t j = 0; j < rows.size(); ++j) fill_row(j);
  }
  return out;
}

}  // namespace

DividedDifferenceMatrix divided_difference(const FunctionSpec& f, const std::vector<cplx>& rows,
                                           const std::vector<cplx>& cols) {
  return assemble_dd(f, rows, cols, true);
}

DividedDifferenceMatrix divided_difference_serial(const FunctionSpec& f,
                                                  const std::vector<cplx>& rows,
                                                  const std::vector<cplx>& cols) {
  return assemble_dd(f, rows, cols, false);
}

// ---------------------------------------------------------------------------
// Toeplitz lattice operators
// ---------------------------------------------------------------------------

LatticeToeplitz::LatticeToeplitz(double r, std::function<cplx(long long, long long)> kernel) {
  if (!(r >= 1.0)) throw std::invalid_argument("LatticeToeplitz: r must be >= 1");
  bound_ = static_cast<long long>(std::floor(r));
  const double r2 = r * r * (1.0 + 1e-12);
  for (long long b = -bound_; b <= bound_; ++b)
    for (long long a = -bound_; a <= bound_; ++a)
      if (static_cast<double>(a * a + b * b) <= r2) pts_.emplace_back(a, b);

  std::size_t need = static_cast<std::size_t>(4 * bound_ + 2);
  fft_n_ = 1;
  while (fft_n_ < need) fft_n_ <<= 1;

  kernel_hat_.assign(fft_n_ * fft_n_, 0.0);
  kernel_adj_hat_.assign(fft_n_ * fft_n_, 0.0);
  auto wrap = [this](long long d) {
    return static_cast<std::size_t>((d % static_cast<long long>(fft_n_) +
                                     static_cast<long long>(fft_n_)) %
                                    static_cast<long long>(fft_n_));
  };
  for (long long dy = -2 * bound_; dy <= 2 * bound_; ++dy)
    for (long long dx = -2 * bound_; dx <= 2 * bound_; ++dx) {
      const cplx g = kernel(dx, dy);
      kernel_hat_[wrap(dy) * fft_n_ + wrap(dx)] = g;
      kernel_adj_hat_[wrap(-dy) * fft_n_ + wrap(-dx)] = std::conj(g);
    }
  fft2(kernel_hat_, fft_n_, -1);
  fft2(kernel_adj_hat_, fft_n_, -1);
}

void LatticeToeplitz::matvec(const cplx* x, cplx* y, bool adj) const {
  std::vector<cplx> grid(fft_n_ * fft_n_, 0.0);
  for (std::size_t i = 0; i < pts_.size(); ++i) {
    const auto [a, b] = pts_[i];
    grid[static_cast<std::size_t>(b + bound_) * fft_n_ + static_cast<std::size_t>(a + bound_)] =
        x[i];
  }
  fft2(grid, fft_n_, -1);
  const std::vector<cplx>& kh = adj ? kernel_adj_hat_ : kernel_hat_;
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] *= kh[i];
  fft2(grid, fft_n_, +1);
  const double inv = 1.0 / static_cast<double>(fft_n_ * fft_n_);
  for (std::size_t i = 0; i < pts_.size(); ++i) {
    const auto [a, b] = pts_[i];
    y[i] = inv * grid[static_cast<std::size_t>(b + bound_) * fft_n_ +
                      static_cast<std::size_t>(a + bound_)];
  }
}

LinearOperator LatticeToeplitz::as_operator() const {
  LinearOperator op;
  op.rows = op.cols = pts_.size();
  op.apply = [this](const cplx* x, cplx* y) { matvec(x, y, false); };
  op.apply_adjoint = [this](const cplx* x, cplx* y) { matvec(x, y, true); };
  return op;
}

// ---------------------------------------------------------------------------
// the sharp log(2r/delta) bounds
// ---------------------------------------------------------------------------

namespace {

double pair_sum_impl(double r, bool parallel) {
  const long long m = static_cast<long long>(std::floor(r));
  const double r2 = r * r * (1.0 + 1e-12);
  std::vector<std::pair<long long, long long>> pts;
  for (long long b = -m; b <= m; ++b)
    for (long long a = -m; a <= m; ++a)
      if (static_cast<double>(a * a + b * b) <= r2) pts.emplace_back(a, b);
  const std::size_t n = pts.size();
  std::vector<double> row_sums(n, 0.0);
  auto compute_row = [&](std::size_t j) {
    const auto [ax, ay] = pts[j];
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      const long long dx = ax - pts[k].first;
      const long long dy = ay - pts[k].second;
      s += 1.0 / static_cast<double>(dx * dx + dy * dy);
    }
    row_sums[j] = s;
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long long j = 0; j < static_cast<long long>(n); ++j)
      compute_row(static_cast<std::size_t>(j));
  } else {
    for (std::size_t j = 0; j < n; ++j) compute_row(j);
  }
  double total = 0.0;
  for (double s : row_sums) total += s;  // index order, deterministic
  return total;
}

}  // namespace

double lambda_pair_sum(double r) { return pair_sum_impl(r, true); }
double lambda_pair_sum_serial(double r) { return pair_sum_impl(r, false); }

NizBound niz_lower_bound(double r) {
  if (!(r >= 3.0)) throw std::invalid_argument("niz_lower_bound: requires r >= 3");
  NizBound out;
  LatticeToeplitz lambda2(r, [](long long a, long long b) -> cplx {
    if (a == 0 && b == 0) return 0.0;
    const cplx p(static_cast<double>(a), static_cast<double>(b));
    return 1.0 / (std::conj(p) * std::conj(p));
  });
  out.points = lambda2.size();
  out.lambda_r_norm_lb = lambda_pair_sum(r) / static_cast<double>(out.points);
  out.lambda2_norm_ub = operator_norm_range(lambda2.as_operator()).upper;
  out.bound = out.lambda_r_norm_lb / out.lambda2_norm_ub;
  return out;
}

double conj_lattice_multiplier_lower(double r) {
  if (!(r >= 3.0)) throw std::invalid_argument("conj_lattice_multiplier_lower: requires r >= 3");
  LatticeToeplitz lambda_r(r, [](long long a, long long b) -> cplx {
    if (a == 0 && b == 0) return 0.0;
    return 1.0 / static_cast<double>(a * a + b * b);
  });
  LatticeToeplitz lambda2(r, [](long long a, long long b) -> cplx {
    if (a == 0 && b == 0) return 0.0;
    const cplx p(static_cast<double>(a), static_cast<double>(b));
    return 1.0 / (std::conj(p) * std::conj(p));
  });
  const double num = operator_norm_range(lambda_r.as_operator()).lower;
  const double den = operator_norm_range(lambda2.as_operator()).upper;
  return num / den;
}

double conj_upper_bound(const LatticeSpec& spec) {
  if (!(spec.delta > 0.0) || !(spec.r > spec.delta))
    throw std::invalid_argument("conj_upper_bound: need 0 < delta < r");
  // distinct lattice pairs differ by delta <= |z - w| <= 2r, where the dyadic
  // annulus function equals D0(conj) exactly; one Toeplitz band costs
  // ||psi_band|| each
  fourier::DyadicH h = fourier::dyadic_h(spec.delta, 2.0 * spec.r);
  return h.bound;
}

int partition_cell(double a, cplx z, cplx w) {
  if (!(a > 0.0)) throw std::invalid_argument("partition_cell: a must be positive");
  const double side = a * std::sqrt(2.0);
  const long long zx = static_cast<long long>(std::floor(z.real() / side));
  const long long zy = static_cast<long long>(std::floor(z.imag() / side));
  const long long wx = static_cast<long long>(std::floor(w.real() / side));
  const long long wy = static_cast<long long>(std::floor(w.imag() / side));
  const long long ox = wx - zx, oy = wy - zy;
  static constexpr int kOrder[3][3] = {
      // oy = -1, 0, 1 across; ox = -1, 0, 1 down; values are cell indices
      {9, 3, 8},  // ox = -1: (-1,-1), (-1,0), (-1,1)
      {5, 1, 4},  // ox =  0: (0,-1),  (0,0),  (0,1)
      {7, 2, 6},  // ox =  1: (1,-1),  (1,0),  (1,1)
  };
  if (ox < -1 || ox > 1 || oy < -1 || oy > 1) return 0;
  return kOrder[ox + 1][oy + 1];
}

double separated_set_bound(const FunctionSpec& f, const std::vector<cplx>& points,
                           double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("separated_set_bound: delta must be positive");
  for (std::size_t j = 0; j < points.size(); ++j)
    for (std::size_t k = j + 1; k < points.size(); ++k) {
      const double d = std::abs(points[j] - points[k]);
      if (d > 0.0 && d < delta * (1.0 - 1e-12)) {
        std::ostringstream os;
        os << "separated_set_bound: points (" << points[j].real() << "," << points[j].imag()
           << ") and (" << points[k].real() << "," << points[k].imag() << ") violate separation "
           << delta;
        throw std::invalid_argument(os.str());
      }
    }
  double sup = 0.0;
  for (const auto& p : points) sup = std::max(sup, std::abs(f(p)));
  const auto& pc = fourier::psi_constant();
  const double psi_norm = 2.0 * (pc.c + pc.quadrature_error);
  return 2.0 * psi_norm * sup / delta;
}

}  // namespace opmod::lattice
