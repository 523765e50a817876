#pragma once

#include <span>

#include "mixent/goodness.hpp"
#include "mixent/vector_distribution.hpp"

namespace mixent {

// All entropies are reported in nats.
struct EntropyResult {
  enum class Method { Quadrature, MonteCarlo };

  double value = 0.0;
  Method method = Method::Quadrature;
  double error_estimate = 0.0;
  // Per-atom contributions -int g_i log g_i in atom order; their sum is the
  // value by construction. Empty for pure density / pmf entropies.
  std::vector<double> terms;
  // False when a goodness gate was overridden or never evaluated.
  bool certified = true;
};

// -sum p_i log p_i with 0 log 0 = 0. Probabilities must be nonnegative and
// sum to 1 within 1e-9.
double shannon_entropy(std::span<const double> pmf);

// -int f log f by adaptive quadrature over the density's finite window.
EntropyResult differential_entropy(const Density& density);

struct MixedEntropyOptions {
  // Gate parameters passed to goodness_check before evaluation.
  double epsilon = 1.0;
  double delta = 1.0;
  // Evaluate even when the certificate fails; the result is then marked
  // uncertified instead of throwing UncertifiedError.
  bool allow_uncertified = false;
  // Absolute quadrature tolerance per atom term.
  double term_tolerance = 1e-8;
};

// -sum_i int g_i log g_i, one quadrature term per atom. The goodness gate
// runs first; see MixedEntropyOptions.
EntropyResult mixed_entropy(const MixedPairDistribution& dist,
                            const MixedEntropyOptions& options = {});

struct VectorEntropyOptions {
  double term_tolerance = 1e-8;
  // Beyond this many coordinates dense tensor quadrature is refused and the
  // estimate switches to Monte Carlo over the atom conditionals.
  int max_quadrature_dim = 4;
  std::size_t mc_samples = 200000;
  std::uint64_t mc_seed = 0x6d69786570ULL;
};

// -sum_x int g_x log g_x over R^d: nested adaptive quadrature per atom
// (tensor panels for product densities, cell sums for grids); Monte Carlo
// above max_quadrature_dim, reported in the method field. Callers are
// responsible for goodness of the vector (the scalar gate has no cheap
// d-dimensional analogue here).
EntropyResult mixed_entropy(const MixedPairVectorDistribution& dist,
                            const VectorEntropyOptions& options = {});

// H(Z_keep.. | Z_given..) = H(joint) - H(marginal over `conditioning`).
EntropyResult conditional_entropy(const MixedPairVectorDistribution& joint,
                                  const std::vector<int>& conditioning,
                                  const VectorEntropyOptions& options = {});

// I(Z_1; Z_2) = H(Z_1) + H(Z_2) - H(Z_1, Z_2) for a two-coordinate joint.
EntropyResult mutual_information(const MixedPairVectorDistribution& joint,
                                 const VectorEntropyOptions& options = {});

// Monte Carlo estimate -1/n sum log g_I(Y) over samples of the pair, with
// the sample standard error as the error estimate.
EntropyResult mc_entropy(const MixedPairDistribution& dist, std::size_t n,
                         RandomStream& rng);

}  // namespace mixent
