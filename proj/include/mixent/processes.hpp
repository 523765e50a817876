#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mixent/density.hpp"
#include "mixent/random.hpp"

namespace mixent {

// Continuous-time Markov chain: Poisson jump clock of rate lambda, embedded
// discrete chain with row-stochastic transition matrix P.
struct CTMCSpec {
  double lambda = 1.0;
  Eigen::MatrixXd P;
  Eigen::VectorXd initial;      // ignored when stationary_start
  bool stationary_start = false;

  CTMCSpec(double lambda, Eigen::MatrixXd P, Eigen::VectorXd initial);
  static CTMCSpec with_stationary_start(double lambda, Eigen::MatrixXd P);

  int states() const { return static_cast<int>(P.rows()); }
};

// Realization of a marked point process on (0, T].
struct SamplePath {
  double horizon = 0.0;
  std::vector<double> jumps;         // strictly increasing, within (0, T]
  std::vector<std::int64_t> marks;   // empty, or one mark per jump

  void validate() const;
  std::size_t count() const { return jumps.size(); }
};

struct CtmcPath {
  SamplePath path;            // marks are the states after each jump
  std::int64_t initial_state; // state before the first jump
};

struct SplitResult {
  SamplePath parent;
  std::vector<std::uint8_t> coins;  // 1 = heads, per parent jump
  SamplePath heads_path;
  SamplePath tails_path;
};

// I.i.d. exponential interarrivals truncated at the horizon.
SamplePath simulate_poisson(double lambda, double horizon, RandomStream& rng);

// Poisson jump times with marks evolved by P from an initial draw.
CtmcPath simulate_ctmc(const CTMCSpec& spec, double horizon, RandomStream& rng);

// Per-jump independent coins of bias p; heads go to one baby process,
// tails to the other.
SplitResult split(const SamplePath& path, double p, RandomStream& rng);

// Exact union of two jump sequences over the same horizon.
SamplePath merge(const SamplePath& a, const SamplePath& b);

// pi with pi P = pi and sum pi = 1, solved as a linear system. Throws
// ReducibleChainError when the chain is not irreducible.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& P);

// H_MC = -sum_i pi(i) sum_j P(i,j) log P(i,j), the per-jump entropy of the
// embedded chain.
double markov_transition_entropy(const Eigen::MatrixXd& P,
                                 const Eigen::VectorXd& pi);

// lambda (1 - log lambda), nats per unit time.
double poisson_entropy_rate(double lambda);

// lambda (1 - log lambda) + lambda H_MC for the stationary chain.
double ctmc_entropy_rate(const CTMCSpec& spec);

// Exact entropy of a Poisson process on (0, T]: the count entropy H(N(T))
// plus the ordered-location entropy sum_k p_k log(T^k / k!), both summed to
// a series tail below 1e-12. Requires lambda * horizon <= 1e5.
double finite_horizon_poisson_entropy(double lambda, double horizon);

// Adds the state information sum_k p_k (H(pi) + k H_MC); requires a
// stationary start (NonStationaryError otherwise).
double finite_horizon_ctmc_entropy(const CTMCSpec& spec, double horizon);

// The four lines of the splitting identity evaluated independently:
//   H(P1) + H(P2)
//   = lp(1 - log lp) + l(1-p)(1 - log l(1-p))
//   = l(1 - log l) + l (-p log p - (1-p) log(1-p))
//   = H(P) + l * coin entropy.
struct SplittingIdentity {
  std::array<double, 4> lines{};
  double max_discrepancy = 0.0;  // over adjacent lines
};

SplittingIdentity splitting_identity(double lambda, double p);

struct BabyProcessEstimate {
  std::string name;  // "heads" or "tails"
  std::size_t events = 0;
  double rate_hat = 0.0;
  double interarrival_entropy = 0.0;  // nearest-neighbor estimate
  double entropy_rate = 0.0;          // rate_hat * interarrival entropy
  double standard_error = 0.0;
  double expected = 0.0;  // mu (1 - log mu) at the true sub-rate
  bool within_tolerance = false;      // |estimate - expected| <= 4 se
  bool exceeds_poisson_bound = false; // estimate > expected + 3 se
};

struct SplitExperimentReport {
  double lambda = 0.0, p = 0.0, horizon = 0.0;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  BabyProcessEstimate heads;
  BabyProcessEstimate tails;
  bool passed = false;
};

// Simulates splitting, estimates each baby's entropy rate via the renewal
// identity (rate x interarrival entropy, the nearest-neighbor estimator on
// the gaps), and compares against the split-rate Poisson values, including
// the maximum-entropy upper-bound check. Needs >= 100 events per baby.
SplitExperimentReport split_entropy_experiment(double lambda, double p,
                                               double horizon,
                                               std::size_t trials,
                                               std::uint64_t seed);

struct OrderStatisticsOptions {
  enum class Method { Auto, Quadrature, MonteCarlo };
  Method method = Method::Auto;   // Auto: quadrature for n <= 4
  std::size_t samples = 1000000;  // Monte Carlo draws
  std::uint64_t seed = 0;
};

struct OrderStatisticsResult {
  double h_iid = 0.0;     // n * h(f), by quadrature
  double h_sorted = 0.0;  // entropy of the increasing rearrangement
  double difference = 0.0;
  double expected_difference = 0.0;  // -log n!
  double standard_error = 0.0;       // of h_sorted; 0 for quadrature
  bool monte_carlo = false;
};

// Joint entropy of n i.i.d. draws against the entropy of their increasing
// rearrangement (density n! prod f on the ordered region): nested quadrature
// over the ordered region for small n, Monte Carlo otherwise.
OrderStatisticsResult order_statistics_entropy(
    const Density& density, int n, const OrderStatisticsOptions& options = {});

}  // namespace mixent
