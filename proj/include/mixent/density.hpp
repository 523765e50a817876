#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mixent/random.hpp"

namespace mixent {

// Closed interval; ends may be +-infinity.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool finite() const;
  bool contains(double y) const { return y >= lo && y <= hi; }
};

// One-dimensional probability density from a closed set of families. The
// analytic families evaluate exactly; piecewise-linear grids interpolate a
// tabulated shape. Mixture and custom variants exist for in-memory
// construction only (marginals, pushforward fallbacks, tests) and are not
// part of the serialized spec format.
class Density {
 public:
  enum class Family { Uniform, Exponential, Gaussian, PiecewiseLinear, Mixture, Custom };

  static Density uniform(double a, double b);
  static Density exponential(double rate, double origin = 0.0);
  static Density gaussian(double mean, double variance);
  // Knots strictly increasing; values nonnegative; trapezoid integral must be
  // 1 within 1e-6. Zero outside [knots.front(), knots.back()].
  static Density piecewise_linear(Eigen::ArrayXd knots, Eigen::ArrayXd values);
  // Same, but rescales the values so the trapezoid integral is exactly 1.
  static Density piecewise_linear_normalized(Eigen::ArrayXd knots,
                                             Eigen::ArrayXd values);
  // Convex combination of normalized densities; weights must sum to 1.
  static Density mixture(std::vector<std::pair<double, Density>> parts);
  // Arbitrary evaluator over an explicit support (testing / derived objects).
  // `breakpoints` flags interior kinks for the quadrature engine; `sampler`
  // is optional and only required when the density will be sampled.
  static Density custom(std::function<double(double)> evaluator,
                        Interval support,
                        std::vector<double> breakpoints = {},
                        std::function<double(RandomStream&)> sampler = {});

  // Density value; exactly 0.0 outside the support.
  double operator()(double y) const;

  Family family() const;
  Interval support() const;

  // True when any part of the representation is a tabulated grid; drives the
  // looser normalization tolerance for tabulated data.
  bool tabulated() const;

  // Finite window outside of which the remaining mass is below `tail_mass`
  // (exact for compact supports, analytic tail bounds otherwise).
  Interval integration_interval(double tail_mass = 1e-12) const;

  // Interior non-smooth points plus support edges, for quadrature splitting.
  std::vector<double> breakpoints() const;

  // Exact mass on [lo, hi] (closed forms per family; quadrature for custom).
  double mass_between(double lo, double hi) const;

  double sample(RandomStream& rng) const;

  // Image density under y -> slope*y + intercept when it stays inside the
  // family set; nullopt means the caller must tabulate.
  std::optional<Density> affine_image(double slope, double intercept) const;

  // Sample an evaluator onto `knots` points over `window` and normalize.
  static Density tabulate(const std::function<double(double)>& evaluator,
                          Interval window, int knots);

  // Parameter access for serialization; only valid for the matching family.
  struct UniformParams { double a, b; };
  struct ExponentialParams { double rate, origin; };
  struct GaussianParams { double mean, variance; };
  UniformParams uniform_params() const;
  ExponentialParams exponential_params() const;
  GaussianParams gaussian_params() const;
  const Eigen::ArrayXd& knots() const;
  const Eigen::ArrayXd& values() const;

  std::string family_name() const;

 private:
  struct Uniform { double a, b; };
  struct Exponential { double rate, origin; };
  struct Gaussian { double mean, variance, sd; };
  struct PiecewiseLinear {
    Eigen::ArrayXd knots;
    Eigen::ArrayXd values;
    Eigen::ArrayXd cumulative;  // trapezoid CDF at knots, for sampling
  };
  struct Mixture {
    std::vector<std::pair<double, Density>> parts;
  };
  struct Custom {
    std::function<double(double)> fn;
    Interval support;
    std::vector<double> breaks;
    std::function<double(RandomStream&)> sampler;
  };

  using Spec = std::variant<Uniform, Exponential, Gaussian, PiecewiseLinear,
                            std::shared_ptr<const Mixture>,
                            std::shared_ptr<const Custom>>;

  explicit Density(Spec spec) : spec_(std::move(spec)) {}

  Spec spec_;
};

}  // namespace mixent
