#ifndef OPMOD_QUADRATURE_HPP
#define OPMOD_QUADRATURE_HPP

#include <cmath>
#include <functional>

namespace opmod {

// plain recursive adaptive Simpson on [a, b]
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int depth = 24) {
  struct Impl {
    const std::function<double(double)>& f;
    double run(double a, double b, double fa, double fm, double fb, double whole,
               double tol, int depth) const {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = f(lm), frm = f(rm);
      const double h = b - a;
      const double left = (h / 12.0) * (fa + 4.0 * flm + fm);
      const double right = (h / 12.0) * (fm + 4.0 * frm + fb);
      const double both = left + right;
      if (depth <= 0 || std::abs(both - whole) <= 15.0 * tol)
        return both + (both - whole) / 15.0;
      return run(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
             run(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
  } impl{f};
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
  return impl.run(a, b, fa, fm, fb, whole, tol, depth);
}

}  // namespace opmod

#endif
