// Timing comparison of the OpenMP kernels against their serial references.
// Correctness of the pairs is covered in the test suites; this target reports
// throughput only.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "opmod/complex_matrix.hpp"
#include "opmod/function_spec.hpp"
#include "opmod/lattice.hpp"
#include "opmod/rng.hpp"

using namespace opmod;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds(clock_type::time_point a, clock_type::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

template <typename F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = clock_type::now();
    f();
    best = std::min(best, seconds(t0, clock_type::now()));
  }
  return best;
}

volatile double sink = 0.0;

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (OpenMP disabled)\n");
#endif
  std::printf("%-28s %12s %12s %8s\n", "kernel", "serial [s]", "parallel [s]", "speedup");

  {
    Rng rng(1);
    const std::size_t n = 192;
    ComplexMatrix a(n, n), b(n, n);
    for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] = rng.complex_normal();
    for (std::size_t i = 0; i < b.size(); ++i) b.data()[i] = rng.complex_normal();
    const double ts = best_of(3, [&] { sink += multiply_serial(a, b).max_abs(); });
    const double tp = best_of(3, [&] { sink += multiply(a, b).max_abs(); });
    std::printf("%-28s %12.4f %12.4f %8.2f\n", "matmul 192x192", ts, tp, ts / tp);
  }
  {
    auto pts = lattice::lattice_points({1.0, 18.0, true});
    const FunctionSpec f = FunctionSpec::conjugate();
    const double ts = best_of(3, [&] {
      sink += lattice::divided_difference_serial(f, pts, pts).matrix.max_abs();
    });
    const double tp =
        best_of(3, [&] { sink += lattice::divided_difference(f, pts, pts).matrix.max_abs(); });
    std::printf("%-28s %12.4f %12.4f %8.2f\n", "divided difference (1021p)", ts, tp, ts / tp);
  }
  {
    const double ts = best_of(2, [&] { sink += lattice::lambda_pair_sum_serial(32.0); });
    const double tp = best_of(2, [&] { sink += lattice::lambda_pair_sum(32.0); });
    std::printf("%-28s %12.4f %12.4f %8.2f\n", "lattice pair sum r=32", ts, tp, ts / tp);
  }
  return 0;
}
