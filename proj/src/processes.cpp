#include "mixent/processes.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "mixent/entropy.hpp"
#include "mixent/errors.hpp"
#include "mixent/estimators.hpp"
#include "mixent/quadrature.hpp"

namespace mixent {
namespace {

void check_row_stochastic(const Eigen::MatrixXd& P) {
  if (P.rows() < 1 || P.rows() != P.cols()) {
    throw InvalidArgumentError("transition matrix must be square and nonempty");
  }
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
      if (P(i, j) < 0.0 || P(i, j) > 1.0) {
        throw InvalidArgumentError("transition probabilities must lie in [0, 1]");
      }
      row += P(i, j);
    }
    if (std::abs(row - 1.0) > 1e-12) {
      throw InvalidArgumentError("transition matrix rows must sum to 1");
    }
  }
}

double plogp(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

std::int64_t step_chain(const Eigen::MatrixXd& P, std::int64_t state,
                        RandomStream& rng) {
  double u = rng.uniform();
  for (Eigen::Index j = 0; j < P.cols(); ++j) {
    if (u < P(state, j)) return j;
    u -= P(state, j);
  }
  return P.cols() - 1;
}

// Both finite-horizon entropies share the Poisson series; `state_weight`
// folds in the per-count state information for the chain case.
double poisson_series(double lambda, double horizon, double entropy_per_step,
                      double initial_entropy) {
  if (!(lambda > 0.0) || !(horizon > 0.0)) {
    throw InvalidArgumentError("rate and horizon must be positive");
  }
  const double a = lambda * horizon;
  if (a > 1e5) {
    throw InvalidArgumentError("series truncation guard: lambda * T must be <= 1e5");
  }
  const double log_a = std::log(a);
  const double log_t = std::log(horizon);
  double total = 0.0;
  double cumulative = 0.0;
  for (std::size_t k = 0;; ++k) {
    const double kd = static_cast<double>(k);
    const double log_pk = -a + kd * log_a - std::lgamma(kd + 1.0);
    const double pk = std::exp(log_pk);
    cumulative += pk;
    // count entropy - sum p_k log p_k, ordered-location entropy
    // p_k log(T^k / k!), and the per-jump state contribution.
    const double term = -pk * log_pk +
                        pk * (kd * log_t - std::lgamma(kd + 1.0)) +
                        pk * (initial_entropy + kd * entropy_per_step);
    total += term;
    const double term_scale =
        pk * (std::abs(log_pk) + kd * std::abs(log_t) + std::lgamma(kd + 1.0) +
              std::abs(initial_entropy) + kd * std::abs(entropy_per_step) + 1.0);
    if (cumulative >= 1.0 - 1e-15 && kd >= a && term_scale < 1e-13) break;
    if (k > 300000) break;  // unreachable under the lambda*T guard
  }
  return total;
}

}  // namespace

CTMCSpec::CTMCSpec(double lambda_in, Eigen::MatrixXd P_in, Eigen::VectorXd initial_in)
    : lambda(lambda_in), P(std::move(P_in)), initial(std::move(initial_in)) {
  if (!(lambda > 0.0)) throw InvalidArgumentError("jump rate must be positive");
  check_row_stochastic(P);
  if (initial.size() != P.rows()) {
    throw InvalidArgumentError("initial distribution size must match the state count");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < initial.size(); ++i) {
    if (initial[i] < 0.0) {
      throw InvalidArgumentError("initial probabilities must be nonnegative");
    }
    total += initial[i];
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgumentError("initial distribution must sum to 1");
  }
}

CTMCSpec CTMCSpec::with_stationary_start(double lambda, Eigen::MatrixXd P) {
  Eigen::VectorXd pi = stationary_distribution(P);
  CTMCSpec spec(lambda, std::move(P), std::move(pi));
  spec.stationary_start = true;
  return spec;
}

void SamplePath::validate() const {
  double previous = 0.0;
  for (double t : jumps) {
    if (!(t > previous) || t > horizon) {
      throw InvalidArgumentError("jump times must be strictly increasing in (0, T]");
    }
    previous = t;
  }
  if (!marks.empty() && marks.size() != jumps.size()) {
    throw InvalidArgumentError("marks must be empty or match the jump count");
  }
}

SamplePath simulate_poisson(double lambda, double horizon, RandomStream& rng) {
  if (!(lambda > 0.0) || !(horizon > 0.0)) {
    throw InvalidArgumentError("rate and horizon must be positive");
  }
  SamplePath path;
  path.horizon = horizon;
  double t = rng.exponential(lambda);
  while (t <= horizon) {
    path.jumps.push_back(t);
    t += rng.exponential(lambda);
  }
  return path;
}

CtmcPath simulate_ctmc(const CTMCSpec& spec, double horizon, RandomStream& rng) {
  CtmcPath result;
  const Eigen::VectorXd start =
      spec.stationary_start ? stationary_distribution(spec.P) : spec.initial;
  double u = rng.uniform();
  std::int64_t state = spec.states() - 1;
  for (Eigen::Index i = 0; i < start.size(); ++i) {
    if (u < start[i]) {
      state = i;
      break;
    }
    u -= start[i];
  }
  result.initial_state = state;
  result.path = simulate_poisson(spec.lambda, horizon, rng);
  result.path.marks.reserve(result.path.jumps.size());
  for (std::size_t i = 0; i < result.path.jumps.size(); ++i) {
    state = step_chain(spec.P, state, rng);
    result.path.marks.push_back(state);
  }
  return result;
}

SplitResult split(const SamplePath& path, double p, RandomStream& rng) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgumentError("bias must be in (0, 1)");
  SplitResult result;
  result.parent = path;
  result.coins.reserve(path.jumps.size());
  result.heads_path.horizon = path.horizon;
  result.tails_path.horizon = path.horizon;
  for (double t : path.jumps) {
    const bool heads = rng.bernoulli(p);
    result.coins.push_back(heads ? 1 : 0);
    (heads ? result.heads_path : result.tails_path).jumps.push_back(t);
  }
  return result;
}

SamplePath merge(const SamplePath& a, const SamplePath& b) {
  if (a.horizon != b.horizon) {
    throw InvalidArgumentError("merged paths must share the horizon");
  }
  SamplePath out;
  out.horizon = a.horizon;
  out.jumps.resize(a.jumps.size() + b.jumps.size());
  std::merge(a.jumps.begin(), a.jumps.end(), b.jumps.begin(), b.jumps.end(),
             out.jumps.begin());
  return out;
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& P) {
  check_row_stochastic(P);
  const Eigen::Index n = P.rows();

  // Irreducibility: every state reaches state 0 and is reached from it.
  auto reachable = [&](bool transpose) {
    std::vector<bool> seen(n, false);
    std::vector<Eigen::Index> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const Eigen::Index i = stack.back();
      stack.pop_back();
      for (Eigen::Index j = 0; j < n; ++j) {
        const double edge = transpose ? P(j, i) : P(i, j);
        if (edge > 0.0 && !seen[j]) {
          seen[j] = true;
          stack.push_back(j);
        }
      }
    }
    return seen;
  };
  const auto forward = reachable(false);
  const auto backward = reachable(true);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!forward[i] || !backward[i]) {
      throw ReducibleChainError("chain is reducible; stationary distribution not unique");
    }
  }

  // Solve pi (P - I) = 0 with the normalization sum pi = 1 replacing one
  // equation.
  Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(n, n);
  A.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b[n - 1] = 1.0;
  Eigen::VectorXd pi = A.fullPivLu().solve(b);
  return pi;
}

double markov_transition_entropy(const Eigen::MatrixXd& P,
                                 const Eigen::VectorXd& pi) {
  if (P.rows() != pi.size()) {
    throw InvalidArgumentError("stationary vector size must match the matrix");
  }
  double h = 0.0;
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < P.cols(); ++j) row -= plogp(P(i, j));
    h += pi[i] * row;
  }
  return h;
}

double poisson_entropy_rate(double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgumentError("rate must be positive");
  return lambda * (1.0 - std::log(lambda));
}

double ctmc_entropy_rate(const CTMCSpec& spec) {
  const Eigen::VectorXd pi = stationary_distribution(spec.P);
  return poisson_entropy_rate(spec.lambda) +
         spec.lambda * markov_transition_entropy(spec.P, pi);
}

double finite_horizon_poisson_entropy(double lambda, double horizon) {
  return poisson_series(lambda, horizon, 0.0, 0.0);
}

double finite_horizon_ctmc_entropy(const CTMCSpec& spec, double horizon) {
  const Eigen::VectorXd pi = stationary_distribution(spec.P);
  if (!spec.stationary_start) {
    // The per-step H_MC identity only holds along the stationary chain.
    for (Eigen::Index i = 0; i < pi.size(); ++i) {
      if (std::abs(spec.initial[i] - pi[i]) > 1e-9) {
        throw NonStationaryError(
            "finite-horizon chain entropy requires the stationary initial distribution");
      }
    }
  }
  double initial_entropy = 0.0;
  for (Eigen::Index i = 0; i < pi.size(); ++i) initial_entropy -= plogp(pi[i]);
  const double h_mc = markov_transition_entropy(spec.P, pi);
  return poisson_series(spec.lambda, horizon, h_mc, initial_entropy);
}

SplittingIdentity splitting_identity(double lambda, double p) {
  if (!(lambda > 0.0)) throw InvalidArgumentError("rate must be positive");
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgumentError("bias must be in (0, 1)");
  SplittingIdentity id;
  const double q = 1.0 - p;
  id.lines[0] = poisson_entropy_rate(lambda * p) + poisson_entropy_rate(lambda * q);
  id.lines[1] = lambda * p * (1.0 - std::log(lambda * p)) +
                lambda * q * (1.0 - std::log(lambda * q));
  id.lines[2] = lambda * (1.0 - std::log(lambda)) +
                lambda * (-p * std::log(p) - q * std::log(q));
  const std::array<double, 2> coin{p, q};
  id.lines[3] = poisson_entropy_rate(lambda) + lambda * shannon_entropy(coin);
  for (std::size_t i = 1; i < id.lines.size(); ++i) {
    id.max_discrepancy =
        std::max(id.max_discrepancy, std::abs(id.lines[i] - id.lines[i - 1]));
  }
  return id;
}

namespace {

BabyProcessEstimate estimate_baby(const std::string& name,
                                  const std::vector<SamplePath>& paths,
                                  double expected_rate, std::uint64_t seed) {
  BabyProcessEstimate baby;
  baby.name = name;
  baby.expected = poisson_entropy_rate(expected_rate);

  double sum = 0.0, sum_sq = 0.0, se_single = 0.0;
  for (std::size_t t = 0; t < paths.size(); ++t) {
    const SamplePath& path = paths[t];
    if (path.count() < 100) {
      throw DegenerateSampleError(
          "too few events (< 100) to estimate an entropy rate");
    }
    baby.events += path.count();
    std::vector<double> gaps;
    gaps.reserve(path.count());
    double previous = 0.0;
    for (double jump : path.jumps) {
      gaps.push_back(jump - previous);
      previous = jump;
    }
    NnOptions options;
    options.seed = seed + 1000003 * t;
    const EstimatorResult h = nn_differential_entropy(gaps, options);
    const double rate_hat = static_cast<double>(path.count()) / path.horizon;
    const double rate_se = std::sqrt(static_cast<double>(path.count())) / path.horizon;
    const double estimate = rate_hat * h.value;
    const double se = std::hypot(rate_hat * h.standard_error, h.value * rate_se);
    sum += estimate;
    sum_sq += estimate * estimate;
    se_single = se;
    if (t == 0) {
      baby.rate_hat = rate_hat;
      baby.interarrival_entropy = h.value;
    }
  }
  const double trials = static_cast<double>(paths.size());
  baby.entropy_rate = sum / trials;
  if (paths.size() == 1) {
    baby.standard_error = se_single;
  } else {
    const double var = std::max(0.0, sum_sq / trials - baby.entropy_rate * baby.entropy_rate);
    baby.standard_error = std::sqrt(var / trials);
  }
  baby.within_tolerance =
      std::abs(baby.entropy_rate - baby.expected) <= 4.0 * baby.standard_error;
  baby.exceeds_poisson_bound =
      baby.entropy_rate > baby.expected + 3.0 * baby.standard_error;
  return baby;
}

}  // namespace

SplitExperimentReport split_entropy_experiment(double lambda, double p,
                                               double horizon,
                                               std::size_t trials,
                                               std::uint64_t seed) {
  if (!(lambda > 0.0) || !(horizon > 0.0)) {
    throw InvalidArgumentError("rate and horizon must be positive");
  }
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgumentError("bias must be in (0, 1)");
  if (trials < 1) throw InvalidArgumentError("need at least one trial");

  SplitExperimentReport report;
  report.lambda = lambda;
  report.p = p;
  report.horizon = horizon;
  report.seed = seed;
  report.trials = trials;

  std::vector<SamplePath> heads, tails;
  for (std::size_t t = 0; t < trials; ++t) {
    RandomStream rng = RandomStream::derive(seed, t);
    const SamplePath parent = simulate_poisson(lambda, horizon, rng);
    SplitResult sr = split(parent, p, rng);
    heads.push_back(std::move(sr.heads_path));
    tails.push_back(std::move(sr.tails_path));
  }
  report.heads = estimate_baby("heads", heads, lambda * p, seed ^ 0x68656164);
  report.tails = estimate_baby("tails", tails, lambda * (1.0 - p), seed ^ 0x7461696c);
  report.passed = report.heads.within_tolerance && report.tails.within_tolerance &&
                  !report.heads.exceeds_poisson_bound &&
                  !report.tails.exceeds_poisson_bound;
  return report;
}

namespace {

// -integral of q log q over the ordered region lo <= y_level <= ... <= y_n,
// built up by nested quadrature with the running lower limit.
quad::Result ordered_region_integral(const Density& f, Eigen::VectorXd& point,
                                     int level, double lower, double upper,
                                     const std::vector<double>& breaks,
                                     double log_nfact, double tol) {
  const int n = static_cast<int>(point.size());
  auto integrand = [&](double y) {
    point[level] = y;
    if (level == n - 1) {
      double logq = log_nfact;
      double q = 1.0;
      for (int i = 0; i < n; ++i) {
        const double fi = f(point[i]);
        if (fi <= 1e-300) return 0.0;
        q *= fi;
        logq += std::log(fi);
      }
      q *= std::exp(log_nfact);
      return q * logq;
    }
    return ordered_region_integral(f, point, level + 1, y, upper, breaks,
                                   log_nfact, tol * 0.05)
        .value;
  };
  return quad::integrate(integrand, lower, upper, tol, breaks);
}

}  // namespace

OrderStatisticsResult order_statistics_entropy(
    const Density& density, int n, const OrderStatisticsOptions& options) {
  if (n < 2) throw InvalidArgumentError("order statistics need n >= 2");
  OrderStatisticsResult result;
  const double log_nfact = std::lgamma(static_cast<double>(n) + 1.0);
  result.expected_difference = -log_nfact;
  result.h_iid = static_cast<double>(n) * differential_entropy(density).value;

  const bool use_quadrature =
      options.method == OrderStatisticsOptions::Method::Quadrature ||
      (options.method == OrderStatisticsOptions::Method::Auto && n <= 4);
  if (use_quadrature) {
    if (n > 4) {
      throw InvalidArgumentError("dense quadrature limited to n <= 4; use Monte Carlo");
    }
    const Interval window = density.integration_interval();
    const auto breaks = density.breakpoints();
    Eigen::VectorXd point(n);
    const double tol = n <= 2 ? 1e-9 : 1e-7;
    const quad::Result r = ordered_region_integral(
        density, point, 0, window.lo, window.hi, breaks, log_nfact, tol);
    result.h_sorted = -r.value;
  } else {
    RandomStream rng(options.seed);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t s = 0; s < options.samples; ++s) {
      double logq = log_nfact;
      for (int i = 0; i < n; ++i) logq += std::log(density(density.sample(rng)));
      sum += logq;
      sum_sq += logq * logq;
    }
    const double count = static_cast<double>(options.samples);
    result.h_sorted = -sum / count;
    const double var = std::max(0.0, sum_sq / count - (sum / count) * (sum / count));
    result.standard_error = std::sqrt(var / count);
    result.monte_carlo = true;
  }
  result.difference = result.h_sorted - result.h_iid;
  return result;
}

}  // namespace mixent
