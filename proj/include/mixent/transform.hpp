#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>

#include "mixent/distribution.hpp"

namespace mixent {

// Continuous part of a map on one region: either affine or a strictly
// monotone piecewise-linear table. Both carry analytic derivatives and
// closed-form inverses.
struct RegionMap1d {
  enum class Type { Affine, Tabulated };

  Type type = Type::Affine;
  double slope = 1.0;
  double intercept = 0.0;
  Eigen::ArrayXd x;   // tabulated input knots, strictly increasing
  Eigen::ArrayXd fx;  // map values at the knots, strictly monotone

  static RegionMap1d affine(double slope, double intercept);
  static RegionMap1d tabulated(Eigen::ArrayXd x, Eigen::ArrayXd fx);

  double operator()(double y) const;
  double derivative(double y) const;
  bool invertible() const;
  RegionMap1d inverted() const;  // throws NonInvertibleError
};

// One piece of a mixed-pair bijection: points (input_label, y) with y in
// `interval` go to (output_label, map(y)). Shared interval boundaries belong
// to the lower region.
struct MapRegion {
  Label input_label;
  Interval interval;
  Label output_label;
  RegionMap1d map;
};

// Piecewise bijection between mixed-pair spaces: a per-region relabeling
// (the discrete projection) plus a per-region monotone continuous map.
class MixedPairMap {
 public:
  explicit MixedPairMap(std::vector<MapRegion> regions);

  const std::vector<MapRegion>& regions() const { return regions_; }

  // Image of a point; throws InvalidArgumentError outside every region.
  std::pair<Label, double> apply(const Label& label, double y) const;

  // Region lookup (boundary points resolve to the lower region).
  const MapRegion* find_region(const Label& label, double y) const;

  // Inverse map, assembled region by region; throws NonInvertibleError when
  // any region's continuous part cannot be inverted.
  MixedPairMap inverse() const;

  // Composition h = g(f(.)); affine regions only, with f-regions split at
  // preimages of g's region boundaries.
  static MixedPairMap compose(const MixedPairMap& f, const MixedPairMap& g);

 private:
  std::vector<MapRegion> regions_;  // sorted by (label, interval.lo)
};

struct BijectivityReport {
  bool bijective = false;
  std::string reason;            // first failure, empty when bijective
  double worst_roundtrip = 0.0;  // max |F_inv(F(y)) - y| over the probe grid
  std::size_t probe_points =0;
};

// Grid-based bijectivity check: invertible pieces, disjoint regions per input
// label, disjoint images per output label, and a forward-inverse round trip
// within 1e-9 on the probe grid. `clip` bounds the probe window for regions
// with infinite extent.
BijectivityReport check_bijective(const MixedPairMap& map,
                                  std::size_t probes_per_region = 1000,
                                  std::optional<Interval> clip = std::nullopt);

struct DerivativeCertification {
  bool certified = false;
  double worst_deviation = 0.0;  // max | |dF_c/dy| - 1 |
  Label worst_label;
  double worst_y = 0.0;
  std::size_t grid_points_per_region = 0;
  double tolerance = 1e-6;
};

// Certifies | dF_c/dy | = 1 within 1e-6 on a per-region probe grid; reports
// the worst deviation and where it occurs. Never throws.
DerivativeCertification unit_derivative_check(
    const MixedPairMap& map, std::size_t grid_points_per_region = 10000,
    std::optional<Interval> clip = std::nullopt);

// Per-atom d-dimensional diffeomorphism with analytic or finite-difference
// Jacobian.
struct VectorAtomMap {
  std::vector<Label> input_label;
  std::vector<Label> output_label;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> forward;
  // Optional analytic Jacobian; otherwise central differences with step
  // h = 1e-6 * max(1, |y_j|) per column.
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
  std::vector<Interval> domain_box;  // probe window per axis

  static VectorAtomMap linear(std::vector<Label> input_label,
                              std::vector<Label> output_label,
                              Eigen::MatrixXd A, Eigen::VectorXd b,
                              std::vector<Interval> domain_box);
};

class VectorMixedPairMap {
 public:
  explicit VectorMixedPairMap(std::vector<VectorAtomMap> atom_maps);
  const std::vector<VectorAtomMap>& atom_maps() const { return atom_maps_; }

  Eigen::MatrixXd jacobian_at(std::size_t atom_index,
                              const Eigen::VectorXd& y) const;

 private:
  std::vector<VectorAtomMap> atom_maps_;
};

struct JacobianCertification {
  bool certified = false;
  double worst_deviation = 0.0;  // max | |det J| - 1 |
  std::size_t worst_atom = 0;
  Eigen::VectorXd worst_point;
  std::size_t singular_points = 0;  // |det| below 1e-12
  std::size_t grid_points_per_atom = 0;
  double tolerance = 1e-6;
};

// Certifies | det J | = 1 within 1e-6 on a tensor probe grid per atom.
JacobianCertification unit_jacobian_check(const VectorMixedPairMap& map,
                                          std::size_t grid_points_per_axis = 20);

// Change of variables, region by region: the image distribution's
// sub-densities are g_i(F_inv(y)) |dF_inv/dy| assembled per output label.
// Requires a bijective map whose regions cover the distribution's support;
// throws NonInvertibleError otherwise. Affine images of analytic families
// stay analytic; everything else falls back to a 4096-knot tabulation.
MixedPairDistribution pushforward(const MixedPairDistribution& dist,
                                  const MixedPairMap& map);

struct PreservationReport {
  double entropy_in = 0.0;
  double entropy_out = 0.0;
  double difference = 0.0;
  bool certified = false;  // unit-derivative certificate for the map
  DerivativeCertification derivative;
  BijectivityReport bijectivity;
};

// Entropy before/after the pushforward together with the unit-derivative
// certificate: certified maps must preserve entropy up to quadrature error
// (plus tabulation error when a pushforward piece left the analytic
// families).
PreservationReport preservation_report(const MixedPairDistribution& dist,
                                       const MixedPairMap& map,
                                       std::size_t grid_points_per_region = 10000);

}  // namespace mixent
