#pragma once

#include <cstdint>
#include <vector>

#include "mixent/distribution.hpp"

namespace mixent {

struct EstimatorResult {
  enum class Method { PlugIn, NearestNeighbor };

  double value = 0.0;  // nats
  std::size_t n = 0;
  double standard_error = 0.0;
  Method method = Method::PlugIn;
  // Tied samples were separated by the deterministic 1e-12-scale jitter.
  bool ties_jittered = false;
};

// Empirical-frequency entropy -sum (c/n) log(c/n) with the asymptotic
// standard error sqrt(Var[-log p_hat] / n).
EstimatorResult plugin_discrete_entropy(const std::vector<Label>& samples);

struct NnOptions {
  int k = 3;
  // Bootstrap resamples behind the standard error; 0 switches to the
  // asymptotic spread of the per-point log-distance terms.
  std::size_t bootstrap = 200;
  std::uint64_t seed = 0;
};

// Kozachenko-Leonenko style k-th nearest-neighbor estimate of differential
// entropy for one-dimensional samples:
//   h = psi(n) - psi(k) + mean_i log(2 r_ik),
// with r_ik the distance from x_i to its k-th nearest neighbor. Tied samples
// are separated by a deterministic jitter at 1e-12 of the sample range.
EstimatorResult nn_differential_entropy(const std::vector<double>& samples,
                                        const NnOptions& options = {});

// Digamma function (used for the estimator's bias correction; exposed for
// the test suite).
double digamma(double x);

}  // namespace mixent
