#ifndef OPMOD_HOLDER_HPP
#define OPMOD_HOLDER_HPP

//
// Module      : holder
// Description : the winding family h_n, operator-Holder ratio searches and
//               the quasicommutator experiments behind the alpha constants
//

#include <string>
#include <vector>

#include "opmod/function_spec.hpp"
#include "opmod/moduli.hpp"

namespace opmod::holder {

struct HnReport {
  int n = 0;
  std::size_t instances = 0;
  std::size_t ratio_violations = 0;        // operator ratio above |2n+1| + 1e-8
  double max_operator_ratio = 0.0;
  double max_telescoping_residual = 0.0;   // relative, over all instances
  double scalar_circle_ratio = 0.0;        // sampled sup of the scalar quotient
};

// (a) operator ratio bound, (b) the telescoping identity behind it,
// (c) scalar sharpness on the circle
HnReport hn_lipschitz_check(int n, std::size_t instances, std::size_t dim, std::uint64_t seed);

struct HolderConstantEstimate {
  double alpha = 0.0;
  double lower = 0.0;            // ratio / ||f||_{Lambda_alpha}
  double raw_ratio = 0.0;        // unnormalized sup of ||f(N1)-f(N2)|| / ||N1-N2||^alpha
  double holder_seminorm = 0.0;  // denominator
  std::string seminorm_method;   // "analytic" or "sampled"
  double delta_used = 0.0;       // ||N1 - N2|| at the best pair
  double r_cap = 0.0;
};

// randomized search for the operator-Holder quotient, normalized by the
// Lambda_alpha seminorm; constant f is rejected as degenerate
HolderConstantEstimate holder_ratio_search(const FunctionSpec& f, double alpha,
                                           std::size_t dim, std::size_t budget,
                                           std::uint64_t seed, double r_cap = 1.0);

struct QuasicommutatorReport {
  double alpha = 0.0;
  std::size_t instances = 0;
  std::size_t used = 0;            // instances with a nonzero denominator
  std::size_t violations = 0;      // zero denominator with nonzero numerator
  double max_ratio = 0.0;          // vs ||f||_{La} ||N1R-RN2||^a ||R||^{1-a}
  double mean_ratio = 0.0;
  double max_omega_ratio = 0.0;    // vs ||R|| (omega_f)**(||N1R-RN2||/||R||)
  double holder_seminorm = 0.0;
  std::string seminorm_method;
};

QuasicommutatorReport quasicommutator_experiment(const FunctionSpec& f, double alpha,
                                                 std::size_t instances, std::size_t dim,
                                                 std::uint64_t seed, double r_cap = 1.0);

// the delta = 2 exp(-1/(1-alpha)) substitution applied to an operator-modulus
// lower envelope of a function with sup <= 1 and Lipschitz constant <= 1
std::vector<HolderConstantEstimate> halpha_lower(const std::vector<double>& alpha_grid,
                                                 const FunctionSpec& f,
                                                 const moduli::ModulusEnvelope& envelope,
                                                 double r_cap = 1.0);

// the substitution point itself
double halpha_delta(double alpha);

}  // namespace opmod::holder

#endif
