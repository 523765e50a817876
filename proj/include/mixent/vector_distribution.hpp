#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <vector>

#include "mixent/distribution.hpp"

namespace mixent {

// Normalized conditional density over R^d attached to one atom of a vector
// distribution. Product form covers independent coordinates; bilinear grids
// cover correlated two-dimensional tabulated data; the custom form carries
// derived objects (merged marginals, test densities) in memory.
class VectorDensity {
 public:
  enum class Kind { Product, Grid2d, Custom };

  static VectorDensity product(std::vector<Density> parts);
  // Bilinear interpolation of `values` (xs.size() rows by ys.size() cols)
  // over the rectangle [xs.front(), xs.back()] x [ys.front(), ys.back()];
  // zero outside. Trapezoid integral must be 1 within 1e-6.
  static VectorDensity grid2d(Eigen::ArrayXd xs, Eigen::ArrayXd ys,
                              Eigen::MatrixXd values);
  static VectorDensity grid2d_normalized(Eigen::ArrayXd xs, Eigen::ArrayXd ys,
                                         Eigen::MatrixXd values);
  static VectorDensity custom(
      int dim, std::function<double(const Eigen::VectorXd&)> evaluator,
      std::vector<Interval> box,
      std::vector<std::vector<double>> axis_breakpoints = {});

  int dim() const { return dim_; }
  Kind kind() const { return kind_; }
  bool tabulated() const;

  double operator()(const Eigen::VectorXd& y) const;

  // Finite per-axis integration window / non-smooth points.
  Interval axis_interval(int axis, double tail_mass = 1e-12) const;
  std::vector<double> axis_breakpoints(int axis) const;

  // Exact marginal onto the kept axes (ascending index list). Product drops
  // factors; grids integrate out one axis in closed form.
  VectorDensity marginal(const std::vector<int>& keep) const;

  // Coordinate-wise sampling; available for product form only.
  Eigen::VectorXd sample(RandomStream& rng) const;

  const std::vector<Density>& parts() const;  // product form only

 private:
  struct Grid {
    Eigen::ArrayXd xs, ys;
    Eigen::MatrixXd values;
  };
  struct Custom {
    std::function<double(const Eigen::VectorXd&)> fn;
    std::vector<Interval> box;
    std::vector<std::vector<double>> breaks;
  };

  VectorDensity() = default;

  int dim_ = 0;
  Kind kind_ = Kind::Product;
  std::vector<Density> parts_;
  std::shared_ptr<const Grid> grid_;
  std::shared_ptr<const Custom> custom_;
};

struct VectorAtom {
  std::vector<Label> label;
  double mass = 0.0;
  VectorDensity density;
};

// Finite vector of mixed pairs: atoms are label tuples in S^d, each carrying
// a normalized conditional density over R^d. Same normalization and
// distinctness invariants as the scalar type.
class MixedPairVectorDistribution {
 public:
  explicit MixedPairVectorDistribution(std::vector<VectorAtom> atoms,
                                       double tail_mass = 0.0);

  int dim() const { return dim_; }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<VectorAtom>& atoms() const { return atoms_; }
  const VectorAtom& atom(std::size_t i) const;
  double truncation_tail_mass() const { return tail_mass_; }
  bool tabulated() const { return tabulated_; }

 private:
  std::vector<VectorAtom> atoms_;
  int dim_ = 0;
  double tail_mass_ = 0.0;
  bool tabulated_ = false;
};

// Marginal distribution over the kept coordinates: atoms project and merge by
// projected label; merged conditional densities become mixtures of the
// per-atom exact marginals.
MixedPairVectorDistribution marginal(const MixedPairVectorDistribution& dist,
                                     std::vector<int> keep);

// Independent two-coordinate joint with product conditionals.
MixedPairVectorDistribution independent_join(const MixedPairDistribution& a,
                                             const MixedPairDistribution& b);

// Vector form of the discrete lift: each label tuple keeps its probability
// and gets independent uniform[0,1] coordinates.
MixedPairVectorDistribution inject_discrete_vector(
    const std::vector<std::pair<std::vector<Label>, double>>& pmf);

// View a scalar distribution as a one-coordinate vector distribution.
MixedPairVectorDistribution as_vector(const MixedPairDistribution& dist);

}  // namespace mixent
