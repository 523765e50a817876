#include "mixent/entropy.hpp"

#include <cmath>
#include <numeric>

#include "mixent/errors.hpp"
#include "mixent/quadrature.hpp"

namespace mixent {
namespace {

// 0 log 0 := 0; densities below 1e-300 contribute exactly nothing.
double plogp(double p) {
  return p > 1e-300 ? p * std::log(p) : 0.0;
}

// -int m*f log(m*f) over the density's window.
quad::Result atom_term(const Density& shape, double mass, double tol) {
  const Interval window = shape.integration_interval();
  const auto breaks = shape.breakpoints();
  quad::Result r = quad::integrate(
      [&](double y) { return plogp(mass * shape(y)); }, window.lo, window.hi,
      tol, breaks);
  r.value = -r.value;
  return r;
}

// Recursive tensor quadrature of `integrand` over axes [axis, d) of the
// density's box; `point` carries the outer coordinates already fixed.
quad::Result nested_integral(const VectorDensity& density,
                             const std::function<double(const Eigen::VectorXd&)>& integrand,
                             Eigen::VectorXd& point, int axis, double tol) {
  const Interval window = density.axis_interval(axis);
  const auto breaks = density.axis_breakpoints(axis);
  if (axis == density.dim() - 1) {
    return quad::integrate(
        [&](double y) {
          point[axis] = y;
          return integrand(point);
        },
        window.lo, window.hi, tol, breaks);
  }
  // Inner integrals run at a tighter tolerance; their recorded error is
  // accumulated into the outer estimate with the outer panel weights folded
  // into a crude width factor.
  double inner_error = 0.0;
  quad::Result outer = quad::integrate(
      [&](double y) {
        point[axis] = y;
        quad::Result inner =
            nested_integral(density, integrand, point, axis + 1, tol * 0.05);
        inner_error = std::max(inner_error, inner.error);
        return inner.value;
      },
      window.lo, window.hi, tol, breaks);
  outer.error += inner_error * window.width();
  return outer;
}

// -int g log g for one bilinear grid cell with a fixed tensor panel rule;
// the integrand is smooth inside a cell, so a single panel per cell is ample.
double grid_cell_entropy(double x0, double x1, double y0, double y1,
                         const std::function<double(double, double)>& f) {
  const auto nodes = quad::panel_nodes();
  const auto weights = quad::panel_weights();
  const double hx = 0.5 * (x1 - x0), cx = 0.5 * (x0 + x1);
  const double hy = 0.5 * (y1 - y0), cy = 0.5 * (y0 + y1);
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      sum += weights[i] * weights[j] *
             plogp(f(cx + hx * nodes[i], cy + hy * nodes[j]));
    }
  }
  return -hx * hy * sum;
}

quad::Result vector_atom_term(const VectorDensity& density, double mass,
                              const VectorEntropyOptions& options) {
  const int d = density.dim();
  if (d == 1) {
    // Delegate to the scalar path when the product has a single factor.
    if (density.kind() == VectorDensity::Kind::Product) {
      return atom_term(density.parts()[0], mass, options.term_tolerance);
    }
    Eigen::VectorXd point(1);
    quad::Result r = nested_integral(
        density,
        [&](const Eigen::VectorXd& y) { return plogp(mass * density(y)); },
        point, 0, options.term_tolerance);
    r.value = -r.value;
    return r;
  }
  if (density.kind() == VectorDensity::Kind::Grid2d) {
    const auto xb = density.axis_breakpoints(0);
    const auto yb = density.axis_breakpoints(1);
    auto f = [&](double x, double y) {
      return mass * density(Eigen::Vector2d(x, y));
    };
    quad::Result r;
    for (std::size_t i = 0; i + 1 < xb.size(); ++i) {
      for (std::size_t j = 0; j + 1 < yb.size(); ++j) {
        r.value += grid_cell_entropy(xb[i], xb[i + 1], yb[j], yb[j + 1], f);
        r.evaluations += quad::panel_nodes().size() * quad::panel_nodes().size();
      }
    }
    r.error = 1e-10;  // fixed-rule cells; no adaptive estimate available
    return r;
  }
  // Relax the tolerance with dimension; nested adaptive quadrature cost grows
  // geometrically.
  double tol = options.term_tolerance;
  if (d == 3) tol = std::max(tol, 1e-6);
  if (d >= 4) tol = std::max(tol, 1e-5);
  Eigen::VectorXd point(d);
  quad::Result r = nested_integral(
      density,
      [&](const Eigen::VectorXd& y) { return plogp(mass * density(y)); },
      point, 0, tol);
  r.value = -r.value;
  return r;
}

}  // namespace

double shannon_entropy(std::span<const double> pmf) {
  if (pmf.empty()) throw InvalidArgumentError("pmf must be nonempty");
  double total = 0.0;
  double h = 0.0;
  for (double p : pmf) {
    if (p < 0.0) throw InvalidArgumentError("pmf probabilities must be nonnegative");
    total += p;
    h -= plogp(p);
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgumentError("pmf must sum to 1");
  }
  return h;
}

EntropyResult differential_entropy(const Density& density) {
  EntropyResult result;
  const quad::Result r = atom_term(density, 1.0, 1e-8);
  result.value = r.value;
  result.error_estimate = r.error;
  return result;
}

EntropyResult mixed_entropy(const MixedPairDistribution& dist,
                            const MixedEntropyOptions& options) {
  EntropyResult result;
  const GoodnessReport gate = goodness_check(dist, options.epsilon, options.delta);
  if (!gate.passed) {
    if (!options.allow_uncertified) {
      throw UncertifiedError(
          "distribution not certified good (" + gate.failure +
          "); the entropy sum may not be absolutely convergent");
    }
    result.certified = false;
  }
  result.terms.reserve(dist.size());
  double error = 0.0;
  for (const Atom& atom : dist.atoms()) {
    const quad::Result term = atom_term(atom.shape, atom.mass, options.term_tolerance);
    result.terms.push_back(term.value);
    error += term.error;
  }
  // Fixed summation order (atom order) for reproducibility.
  result.value = std::accumulate(result.terms.begin(), result.terms.end(), 0.0);
  result.error_estimate = error;
  return result;
}

EntropyResult mixed_entropy(const MixedPairVectorDistribution& dist,
                            const VectorEntropyOptions& options) {
  EntropyResult result;
  if (dist.dim() > options.max_quadrature_dim) {
    // Dense quadrature refused; Monte Carlo over the atom conditionals.
    RandomStream rng(options.mc_seed);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t k = 0; k < options.mc_samples; ++k) {
      double u = rng.uniform();
      const VectorAtom* chosen = &dist.atoms().back();
      for (const VectorAtom& atom : dist.atoms()) {
        if (u < atom.mass) {
          chosen = &atom;
          break;
        }
        u -= atom.mass;
      }
      const Eigen::VectorXd y = chosen->density.sample(rng);
      const double logg = std::log(chosen->mass * chosen->density(y));
      sum += logg;
      sum_sq += logg * logg;
    }
    const double n = static_cast<double>(options.mc_samples);
    result.value = -sum / n;
    const double var = std::max(0.0, sum_sq / n - (sum / n) * (sum / n));
    result.error_estimate = std::sqrt(var / n);
    result.method = EntropyResult::Method::MonteCarlo;
    return result;
  }
  result.terms.reserve(dist.size());
  double error = 0.0;
  for (const VectorAtom& atom : dist.atoms()) {
    const quad::Result term = vector_atom_term(atom.density, atom.mass, options);
    result.terms.push_back(term.value);
    error += term.error;
  }
  result.value = std::accumulate(result.terms.begin(), result.terms.end(), 0.0);
  result.error_estimate = error;
  return result;
}

EntropyResult conditional_entropy(const MixedPairVectorDistribution& joint,
                                  const std::vector<int>& conditioning,
                                  const VectorEntropyOptions& options) {
  const EntropyResult joint_h = mixed_entropy(joint, options);
  if (static_cast<int>(conditioning.size()) == joint.dim()) {
    // Conditioning on everything: H(Z|Z) = 0 by definition.
    EntropyResult result;
    result.value = 0.0;
    result.error_estimate = 0.0;
    return result;
  }
  const EntropyResult given_h = mixed_entropy(marginal(joint, conditioning), options);
  EntropyResult result;
  result.value = joint_h.value - given_h.value;
  result.error_estimate = joint_h.error_estimate + given_h.error_estimate;
  result.method = joint_h.method;
  return result;
}

EntropyResult mutual_information(const MixedPairVectorDistribution& joint,
                                 const VectorEntropyOptions& options) {
  if (joint.dim() != 2) {
    throw InvalidArgumentError("mutual information needs a two-coordinate joint");
  }
  const EntropyResult h1 = mixed_entropy(marginal(joint, {0}), options);
  const EntropyResult h2 = mixed_entropy(marginal(joint, {1}), options);
  const EntropyResult h12 = mixed_entropy(joint, options);
  EntropyResult result;
  result.value = h1.value + h2.value - h12.value;
  result.error_estimate =
      h1.error_estimate + h2.error_estimate + h12.error_estimate;
  result.method = h12.method;
  return result;
}

EntropyResult mc_entropy(const MixedPairDistribution& dist, std::size_t n,
                         RandomStream& rng) {
  if (n < 1) throw InvalidArgumentError("sample count must be >= 1");
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto [index, y] = dist.sample_indexed(rng);
    const double logg = std::log(dist.sub_density(index, y));
    sum += logg;
    sum_sq += logg * logg;
  }
  EntropyResult result;
  const double dn = static_cast<double>(n);
  result.value = -sum / dn;
  const double var = std::max(0.0, sum_sq / dn - (sum / dn) * (sum / dn));
  result.error_estimate = n > 1 ? std::sqrt(var / dn) : 0.0;
  result.method = EntropyResult::Method::MonteCarlo;
  return result;
}

}  // namespace mixent
