#include "mixent/goodness.hpp"

#include <cmath>

#include "mixent/errors.hpp"
#include "mixent/quadrature.hpp"

namespace mixent {
namespace {

// Integrate fn(y) against the marginal over the distribution's finite window,
// extending by doubling blocks when an atom has a custom unbounded support.
double integrate_against_marginal(const MixedPairDistribution& dist,
                                  const std::function<double(double)>& weight,
                                  double extra_breakpoint = 0.0) {
  auto integrand = [&](double y) { return weight(y) * dist.marginal_density(y); };
  bool custom_unbounded = false;
  for (const Atom& atom : dist.atoms()) {
    if (atom.shape.family() == Density::Family::Custom &&
        !atom.shape.support().finite()) {
      custom_unbounded = true;
    }
  }
  const Interval window = dist.integration_interval();
  auto breaks = dist.breakpoints();
  breaks.push_back(extra_breakpoint);
  if (!custom_unbounded) {
    return quad::integrate(integrand, window.lo, window.hi, 1e-10, breaks).value;
  }
  // Analytic tails unavailable: probe outward and apply the divergence rule.
  double value = quad::integrate(integrand, -1.0, 1.0, 1e-10, breaks).value;
  value += quad::integrate_to_infinity(integrand, 1.0, 1e-10).value;
  value += quad::integrate_to_infinity([&](double y) { return integrand(-y); },
                                       1.0, 1e-10).value;
  return value;
}

}  // namespace

double epsilon_moment(const MixedPairDistribution& dist, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgumentError("epsilon must be positive");
  return integrate_against_marginal(
      dist, [epsilon](double y) { return std::pow(std::abs(y), epsilon); });
}

double power_integral(const MixedPairDistribution& dist, double delta) {
  if (!(delta > 0.0)) throw InvalidArgumentError("delta must be positive");
  // g^(1+delta) = g^delta * g, so reuse the marginal-weighted integrator.
  return integrate_against_marginal(dist, [&](double y) {
    return std::pow(dist.marginal_density(y), delta);
  });
}

double discrete_entropy(const MixedPairDistribution& dist) {
  double h = 0.0;
  for (const Atom& atom : dist.atoms()) {
    h -= atom.mass * std::log(atom.mass);
  }
  return h;
}

double normalizing_constant_c(double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgumentError("epsilon must be positive");
  double half;
  if (epsilon >= 1.0) {
    // Direct window: exp(-y^eps) < 1e-18 past (18 ln 10)^(1/eps) <= 41.5.
    auto f = [epsilon](double y) { return std::exp(-std::pow(y, epsilon)); };
    const double radius = std::pow(-std::log(1e-18), 1.0 / epsilon);
    half = quad::integrate(f, 0.0, radius, 1e-13).value;
  } else {
    // For small eps the direct window blows up like 40^(1/eps); substituting
    // u = y^eps gives (1/eps) int u^(1/eps - 1) exp(-u) du with a
    // nonnegative exponent and a moderate gamma-style window. The power
    // overflows double precision below eps ~ 0.006.
    const double power = 1.0 / epsilon - 1.0;
    if (power > 170.0) {
      throw InvalidArgumentError("epsilon too small for the normalizer in double precision");
    }
    auto f = [power](double u) {
      return u > 0.0 ? std::pow(u, power) * std::exp(-u) : 0.0;
    };
    const double radius = power + 60.0 + 10.0 * std::sqrt(std::max(1.0, power));
    half = quad::integrate(f, 0.0, radius, 1e-13).value / epsilon;
  }
  return 1.0 / (2.0 * half);
}

double log_threshold_b(double delta) {
  if (!(delta > 0.0)) throw InvalidArgumentError("delta must be positive");
  auto gap = [delta](double x) { return std::pow(x, delta) - std::log(x); };
  // gap is minimized at x* = (1/delta)^(1/delta); if still nonnegative there,
  // log x <= x^delta holds on all of [1, inf).
  const double x_star = std::pow(1.0 / delta, 1.0 / delta);
  if (gap(std::max(1.0, x_star)) >= 0.0) return 1.0;
  // Otherwise the gap has exactly one sign change beyond x*; bisect for it.
  double lo = x_star;
  double hi = std::max(2.0 * x_star, 2.0);
  while (gap(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e300) throw DivergentIntegralError("no finite log threshold");
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) < 0.0 ? lo : hi) = mid;
    if (hi - lo <= 1e-13 * hi) break;
  }
  return hi;
}

GoodnessReport goodness_check(const MixedPairDistribution& dist, double epsilon,
                              double delta) {
  GoodnessReport report;
  report.epsilon = epsilon;
  report.delta = delta;
  report.discrete_entropy = discrete_entropy(dist);
  report.C_epsilon = normalizing_constant_c(epsilon);
  report.B_delta = log_threshold_b(delta);
  try {
    report.M_epsilon = epsilon_moment(dist, epsilon);
    report.power_integral = power_integral(dist, delta);
  } catch (const DivergentIntegralError& e) {
    report.passed = false;
    report.failure = e.what();
    return report;
  }
  // Per-atom bound |int g_i log g_i| <= -p_i log p_i + p_i |log C_eps|
  //   + int |y|^eps g_i + p_i log B_delta + int g_i^(1+delta),
  // summed over atoms and relaxed to the marginal power integral:
  //   sum_i |int g_i log g_i|
  //     <= -sum p_i log p_i + |log C_eps| + M_eps + log B_delta
  //        + int g^(1+delta).
  report.magnitude_bound = report.discrete_entropy +
                           std::abs(std::log(report.C_epsilon)) +
                           report.M_epsilon + std::log(report.B_delta) +
                           report.power_integral;
  report.passed = std::isfinite(report.magnitude_bound) &&
                  std::isfinite(report.discrete_entropy);
  return report;
}

}  // namespace mixent
