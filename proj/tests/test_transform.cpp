#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "corpus.hpp"
#include "mixent/entropy.hpp"
#include "mixent/errors.hpp"
#include "mixent/transform.hpp"

using namespace mixent;

namespace {

Label lab(std::int64_t v) { return Label{v}; }

// Split of uniform[0,2]: identity on [0,1] under output 0, shift down by one
// on (1,2] under output 1.
MixedPairMap split_map() {
  return MixedPairMap({{lab(0), {0.0, 1.0}, lab(0), RegionMap1d::affine(1.0, 0.0)},
                       {lab(0), {1.0, 2.0}, lab(1), RegionMap1d::affine(1.0, -1.0)}});
}

MixedPairMap identity_map(Interval range = {-10.0, 10.0}) {
  return MixedPairMap({{lab(0), range, lab(0), RegionMap1d::affine(1.0, 0.0)}});
}

// Collapses (1,2] onto the single value 2: the quantization attempt.
MixedPairMap quantization_map() {
  return MixedPairMap({{lab(0), {0.0, 1.0}, lab(0), RegionMap1d::affine(1.0, 0.0)},
                       {lab(0), {1.0, 2.0}, lab(2), RegionMap1d::affine(0.0, 2.0)}});
}

MixedPairDistribution u02() {
  return inject_continuous(Density::uniform(0.0, 2.0));
}

}  // namespace

TEST_CASE("apply") {
  const MixedPairMap map = split_map();
  {
    const auto [label, y] = map.apply(lab(0), 1.5);
    CHECK(label == lab(1));
    CHECK(y == doctest::Approx(0.5));
  }
  {
    const auto [label, y] = map.apply(lab(0), 0.5);
    CHECK(label == lab(0));
    CHECK(y == doctest::Approx(0.5));
  }
  {
    const auto [label, y] = identity_map().apply(lab(0), 0.37);
    CHECK(label == lab(0));
    CHECK(y == 0.37);
  }
  CHECK_THROWS_AS(map.apply(lab(0), 5.0), InvalidArgumentError);
  CHECK_THROWS_AS(map.apply(lab(3), 0.5), InvalidArgumentError);
}

TEST_CASE("shared boundaries belong to the lower region") {
  const auto [label, y] = split_map().apply(lab(0), 1.0);
  CHECK(label == lab(0));
  CHECK(y == doctest::Approx(1.0));
}

TEST_CASE("derivative certification") {
  CHECK(unit_derivative_check(split_map()).certified);

  const MixedPairMap doubling(
      {{lab(0), {0.0, 1.0}, lab(0), RegionMap1d::affine(2.0, 0.0)}});
  const auto scaled = unit_derivative_check(doubling);
  CHECK_FALSE(scaled.certified);
  CHECK(scaled.worst_deviation == doctest::Approx(1.0));  // |dF/dy| = 2

  const MixedPairMap shift(
      {{lab(0), {0.0, 1.0}, lab(0), RegionMap1d::affine(1.0, 3.0)}});
  CHECK(unit_derivative_check(shift).certified);

  const MixedPairMap reflect(
      {{lab(0), {0.0, 1.0}, lab(0), RegionMap1d::affine(-1.0, 1.0)}});
  CHECK(unit_derivative_check(reflect).certified);
}

TEST_CASE("bijectivity checks") {
  CHECK(check_bijective(split_map()).bijective);

  // Zero slope cannot be inverted.
  const auto rejected = check_bijective(quantization_map());
  CHECK_FALSE(rejected.bijective);
  CHECK(rejected.reason.find("non-invertible") != std::string::npos);

  // Overlapping images under the same output label.
  const MixedPairMap folded(
      {{lab(0), {0.0, 1.0}, lab(0), RegionMap1d::affine(1.0, 0.0)},
       {lab(0), {1.0, 2.0}, lab(0), RegionMap1d::affine(-1.0, 2.0)}});
  const auto fold_report = check_bijective(folded);
  CHECK_FALSE(fold_report.bijective);
  CHECK(fold_report.reason.find("overlap") != std::string::npos);
}

TEST_CASE("forward-inverse round trip on random points") {
  const MixedPairMap map = split_map();
  const MixedPairMap inv = map.inverse();
  RandomStream rng(8);
  for (int i = 0; i < 1000; ++i) {
    const double y = rng.uniform(0.0, 2.0);
    const auto [mid_label, mid_y] = map.apply(lab(0), y);
    const auto [back_label, back_y] = inv.apply(mid_label, mid_y);
    REQUIRE(back_label == lab(0));
    REQUIRE(std::abs(back_y - y) <= 1e-9);
  }
}

TEST_CASE("tabulated monotone region maps invert") {
  Eigen::ArrayXd x(4), fx(4);
  x << 0.0, 0.5, 1.0, 2.0;
  fx << 0.0, 1.0, 1.5, 1.75;
  const RegionMap1d warp = RegionMap1d::tabulated(x, fx);
  CHECK(warp.invertible());
  const RegionMap1d back = warp.inverted();
  for (double y : {0.1, 0.49, 0.8, 1.3, 1.9}) {
    CHECK(back(warp(y)) == doctest::Approx(y).epsilon(1e-12));
  }
  Eigen::ArrayXd flat(3), flat_f(3);
  flat << 0.0, 1.0, 2.0;
  flat_f << 0.0, 0.0, 1.0;
  CHECK_FALSE(RegionMap1d::tabulated(flat, flat_f).invertible());
}

TEST_CASE("pushforward of the split example") {
  const auto pushed = pushforward(u02(), split_map());
  REQUIRE(pushed.size() == 2);
  double total = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(pushed.atom_mass(i) == doctest::Approx(0.5).epsilon(1e-9));
    total += pushed.atom_mass(i);
    // each conditional is uniform[0,1]
    for (int k = 0; k < 100; ++k) {
      const double y = (k + 0.5) / 100.0;
      CHECK(pushed.sub_density(i, y) == doctest::Approx(0.5).epsilon(1e-9));
    }
    CHECK(pushed.sub_density(i, 1.5) == 0.0);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(mixed_entropy(pushed).value == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("pushforward through the identity and a shift") {
  const auto same = pushforward(u02(), identity_map());
  CHECK(same.size() == 1);
  CHECK(same.atom_mass(0) == doctest::Approx(1.0));
  for (double y : {0.1, 0.9, 1.7}) {
    CHECK(same.marginal_density(y) == doctest::Approx(0.5).epsilon(1e-12));
  }

  const MixedPairMap shift(
      {{lab(0), {0.0, 1.0}, lab(0), RegionMap1d::affine(1.0, 3.0)}});
  const auto moved = pushforward(inject_continuous(Density::uniform(0, 1)), shift);
  CHECK(moved.conditional_density(0).support().lo == doctest::Approx(3.0));
  CHECK(moved.conditional_density(0).support().hi == doctest::Approx(4.0));
  CHECK(moved.marginal_density(3.5) == doctest::Approx(1.0));
}

TEST_CASE("pushforward preserves mass and atom count for label-pure maps") {
  for (const auto& dist : mixent::testing::corpus(5, 310, /*allow_tabulated=*/false)) {
    // shift every atom by 2, label-preserving single region per atom
    std::vector<MapRegion> regions;
    for (const Atom& atom : dist.atoms()) {
      const Interval w = atom.shape.integration_interval();
      regions.push_back({atom.label, {w.lo - 1.0, w.hi + 1.0}, atom.label,
                         RegionMap1d::affine(1.0, 2.0)});
    }
    const MixedPairMap map{std::move(regions)};
    const auto pushed = pushforward(dist, map);
    CHECK(pushed.size() == dist.size());
    double total = 0.0;
    for (std::size_t i = 0; i < pushed.size(); ++i) total += pushed.atom_mass(i);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("preservation report for the split example") {
  const auto report = preservation_report(u02(), split_map());
  CHECK(report.certified);
  CHECK(report.entropy_in == doctest::Approx(std::log(2.0)).epsilon(1e-8));
  CHECK(report.entropy_out == doctest::Approx(std::log(2.0)).epsilon(1e-8));
  CHECK(std::abs(report.difference) <= 2e-8);
}

TEST_CASE("non-unit derivatives change entropy and lose the certificate") {
  const MixedPairMap doubling(
      {{lab(0), {0.0, 1.0}, lab(0), RegionMap1d::affine(2.0, 0.0)}});
  const auto report =
      preservation_report(inject_continuous(Density::uniform(0, 1)), doubling);
  CHECK_FALSE(report.certified);
  CHECK(report.entropy_in == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(report.entropy_out == doctest::Approx(std::log(2.0)).epsilon(1e-8));
}

TEST_CASE("quantization map is rejected, not evaluated") {
  CHECK_THROWS_AS(preservation_report(u02(), quantization_map()),
                  NonInvertibleError);
  CHECK_THROWS_AS(pushforward(u02(), quantization_map()), NonInvertibleError);
}

TEST_CASE("certified maps preserve entropy across the corpus") {
  for (const auto& dist : mixent::testing::corpus(12, 55, /*allow_tabulated=*/false)) {
    std::vector<MapRegion> regions;
    bool flip = false;
    for (const Atom& atom : dist.atoms()) {
      const Interval w = atom.shape.integration_interval();
      // Alternate shifts and reflections, both unit-derivative. Reflections
      // only where the image stays analytic, so the comparison is pure
      // quadrature against quadrature.
      const bool reflect = flip && atom.shape.affine_image(-1.0, 1.0).has_value();
      regions.push_back({atom.label, {w.lo - 1.0, w.hi + 1.0}, atom.label,
                         reflect ? RegionMap1d::affine(-1.0, 1.0)
                                 : RegionMap1d::affine(1.0, -2.0)});
      flip = !flip;
    }
    const auto report = preservation_report(dist, MixedPairMap{std::move(regions)});
    CHECK(report.certified);
    CHECK(std::abs(report.difference) <= 2e-7);
  }
}

TEST_CASE("reflected exponentials preserve entropy through the tabulated fallback") {
  const auto dist = inject_continuous(Density::exponential(1.0));
  const Interval w = dist.atom(0).shape.integration_interval();
  const MixedPairMap reflect(
      {{lab(0), {w.lo - 1.0, w.hi + 1.0}, lab(0), RegionMap1d::affine(-1.0, 0.0)}});
  const auto report = preservation_report(dist, reflect);
  CHECK(report.certified);
  // The image leaves the analytic families; the 4096-knot tabulation costs
  // a few 1e-6 of entropy accuracy.
  CHECK(std::abs(report.difference) <= 1e-4);
  const auto pushed = pushforward(dist, reflect);
  CHECK(pushed.conditional_density(0).family() == Density::Family::PiecewiseLinear);
  CHECK(pushed.marginal_density(-1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-3));
}

TEST_CASE("tabulated map pushforward obeys the change of variables") {
  // Smooth monotone warp of [0,1] onto [0,1], far from unit derivative.
  const int knots = 257;
  Eigen::ArrayXd x(knots), fx(knots);
  for (int i = 0; i < knots; ++i) {
    const double t = static_cast<double>(i) / (knots - 1);
    x[i] = t;
    fx[i] = t * t * (3.0 - 2.0 * t);  // smoothstep
  }
  const MixedPairMap warp(
      {{lab(0), {0.0, 1.0}, lab(0), RegionMap1d::tabulated(x, fx)}});
  const auto pushed = pushforward(inject_continuous(Density::uniform(0, 1)), warp);
  REQUIRE(pushed.size() == 1);
  CHECK(pushed.atom_mass(0) == doctest::Approx(1.0).epsilon(1e-9));
  // h(y2) = |d inv/d y2| for a uniform input: check against the inverse slope.
  const RegionMap1d inverse = warp.regions()[0].map.inverted();
  for (double y2 : {0.1, 0.35, 0.5, 0.81}) {
    CHECK(pushed.marginal_density(y2) ==
          doctest::Approx(std::abs(inverse.derivative(y2))).epsilon(5e-3));
  }
}

TEST_CASE("regions merging into one output label build a mixture atom") {
  // [0,1] keeps its place, (1,2] moves to (2,3]; both land on label 0.
  const MixedPairMap spread(
      {{lab(0), {0.0, 1.0}, lab(0), RegionMap1d::affine(1.0, 0.0)},
       {lab(0), {1.0, 2.0}, lab(0), RegionMap1d::affine(1.0, 1.0)}});
  const auto pushed = pushforward(u02(), spread);
  REQUIRE(pushed.size() == 1);
  CHECK(pushed.atom_mass(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pushed.marginal_density(0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pushed.marginal_density(1.5) == doctest::Approx(0.0));
  CHECK(pushed.marginal_density(2.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mixed_entropy(pushed).value == doctest::Approx(std::log(2.0)).epsilon(1e-8));
}

TEST_CASE("composition of certified maps stays certified") {
  const MixedPairMap f(
      {{lab(0), {0.0, 2.0}, lab(0), RegionMap1d::affine(1.0, 1.0)}});
  const MixedPairMap g(
      {{lab(0), {1.0, 2.0}, lab(0), RegionMap1d::affine(1.0, -1.0)},
       {lab(0), {2.0, 3.0}, lab(1), RegionMap1d::affine(-1.0, 4.0)}});
  const MixedPairMap composed = MixedPairMap::compose(f, g);
  CHECK(check_bijective(composed).bijective);
  CHECK(unit_derivative_check(composed).certified);
  RandomStream rng(4);
  for (int i = 0; i < 200; ++i) {
    const double y = rng.uniform(0.0, 2.0);
    const auto [mid_label, mid_y] = f.apply(lab(0), y);
    const auto direct = g.apply(mid_label, mid_y);
    const auto chained = composed.apply(lab(0), y);
    CHECK(chained.first == direct.first);
    CHECK(chained.second == doctest::Approx(direct.second).epsilon(1e-12));
  }
}

TEST_CASE("jacobian certification") {
  const std::vector<Label> tuple{lab(0), lab(0)};
  const std::vector<Interval> box{{0.0, 1.0}, {0.0, 1.0}};

  // Coordinate sorting: identity under indicator 0, swap under indicator 1.
  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  const VectorMixedPairMap sorter(
      {VectorAtomMap::linear({lab(0)}, {lab(0)}, Eigen::MatrixXd::Identity(2, 2),
                             Eigen::VectorXd::Zero(2), box),
       VectorAtomMap::linear({lab(1)}, {lab(1)}, swap, Eigen::VectorXd::Zero(2), box)});
  const auto sorted = unit_jacobian_check(sorter);
  CHECK(sorted.certified);
  CHECK(sorted.worst_deviation <= 1e-9);

  // Rotations are volume preserving.
  const double angle = 0.7;
  Eigen::MatrixXd rotation(2, 2);
  rotation << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  VectorAtomMap rotate = VectorAtomMap::linear(tuple, tuple, rotation,
                                               Eigen::VectorXd::Zero(2), box);
  CHECK(unit_jacobian_check(VectorMixedPairMap({rotate})).certified);

  // Diagonal (2, 1/2): determinant 1, volume (hence entropy) preserving.
  Eigen::MatrixXd squeeze(2, 2);
  squeeze << 2.0, 0.0, 0.0, 0.5;
  VectorAtomMap squeezed = VectorAtomMap::linear(tuple, tuple, squeeze,
                                                 Eigen::VectorXd::Zero(2), box);
  CHECK(unit_jacobian_check(VectorMixedPairMap({squeezed})).certified);

  // A projection is singular everywhere.
  Eigen::MatrixXd proj(2, 2);
  proj << 1.0, 0.0, 0.0, 0.0;
  VectorAtomMap collapse = VectorAtomMap::linear(tuple, tuple, proj,
                                                 Eigen::VectorXd::Zero(2), box);
  const auto singular = unit_jacobian_check(VectorMixedPairMap({collapse}));
  CHECK_FALSE(singular.certified);
  CHECK(singular.singular_points > 0);
}

TEST_CASE("finite differences recover the jacobian when analytic is absent") {
  VectorAtomMap nonlinear;
  nonlinear.input_label = {lab(0), lab(0)};
  nonlinear.output_label = {lab(0), lab(0)};
  // Area-preserving shear (y0 + s(y1), y1) with s nonlinear.
  nonlinear.forward = [](const Eigen::VectorXd& y) {
    Eigen::VectorXd out(2);
    out[0] = y[0] + std::sin(y[1]);
    out[1] = y[1];
    return out;
  };
  nonlinear.domain_box = {{0.0, 1.0}, {0.0, 1.0}};
  const auto report = unit_jacobian_check(VectorMixedPairMap({nonlinear}));
  CHECK(report.certified);
}
