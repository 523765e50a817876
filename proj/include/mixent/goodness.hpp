#pragma once

#include "mixent/distribution.hpp"

namespace mixent {

// Certificate that the per-atom entropy integrals of a distribution are
// absolutely summable, assembled from the three sufficient conditions
// (finite fractional moment, finite power integral, finite discrete entropy)
// together with the explicit bound they imply on sum_i |int g_i log g_i|.
struct GoodnessReport {
  double epsilon = 0.0;
  double delta = 0.0;
  double M_epsilon = 0.0;        // int |y|^eps g(y) dy
  double power_integral = 0.0;   // int g(y)^(1+delta) dy
  double discrete_entropy = 0.0; // -sum p_i log p_i
  double B_delta = 0.0;          // smallest B >= 1 with log x <= x^delta beyond it
  double C_epsilon = 0.0;        // normalizer of exp(-|y|^eps)
  double magnitude_bound = 0.0;  // bound on sum_i |int g_i log g_i|, nats
  bool passed = false;
  std::string failure;           // which condition diverged, when !passed
};

// int |y|^epsilon g(y) dy over the union of atom supports. Throws
// DivergentIntegralError when the tail keeps growing at the truncation
// radius.
double epsilon_moment(const MixedPairDistribution& dist, double epsilon);

// int g(y)^(1+delta) dy for the marginal density g.
double power_integral(const MixedPairDistribution& dist, double delta);

// -sum_i p_i log p_i over atom masses (truncation tail excluded).
double discrete_entropy(const MixedPairDistribution& dist);

// C_eps with int C_eps exp(-|y|^eps) dy = 1, computed by quadrature.
double normalizing_constant_c(double epsilon);

// Smallest B >= 1 such that log x <= x^delta for every x >= B; equals 1
// whenever the inequality already holds on [1, inf).
double log_threshold_b(double delta);

// Evaluates the three sufficient conditions and assembles the magnitude
// bound; divergent integrals yield a failed report instead of an exception.
GoodnessReport goodness_check(const MixedPairDistribution& dist,
                              double epsilon = 1.0, double delta = 1.0);

}  // namespace mixent
