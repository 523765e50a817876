#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "corpus.hpp"
#include "mixent/density.hpp"
#include "mixent/errors.hpp"
#include "mixent/quadrature.hpp"

using namespace mixent;

namespace {

double integral_of(const Density& f) {
  const Interval w = f.integration_interval();
  return quad::integrate([&](double y) { return f(y); }, w.lo, w.hi, 1e-11,
                         f.breakpoints())
      .value;
}

}  // namespace

TEST_CASE("family evaluation and support") {
  const Density u = Density::uniform(0.0, 2.0);
  CHECK(u(1.0) == doctest::Approx(0.5));
  CHECK(u(-0.1) == 0.0);
  CHECK(u(2.1) == 0.0);

  const Density e = Density::exponential(2.0);
  CHECK(e(0.0) == doctest::Approx(2.0));
  CHECK(e(1.0) == doctest::Approx(2.0 * std::exp(-2.0)));
  CHECK(e(-1e-9) == 0.0);

  const Density g = Density::gaussian(1.0, 4.0);
  CHECK(g(1.0) == doctest::Approx(1.0 / std::sqrt(8.0 * M_PI)));

  Eigen::ArrayXd knots(3), values(3);
  knots << 0.0, 1.0, 2.0;
  values << 0.0, 1.0, 0.0;
  const Density t = Density::piecewise_linear(knots, values);
  CHECK(t(0.5) == doctest::Approx(0.5));
  CHECK(t(1.5) == doctest::Approx(0.5));
  CHECK(t(2.5) == 0.0);
}

TEST_CASE("construction rejects bad parameters") {
  CHECK_THROWS_AS(Density::uniform(1.0, 1.0), InvalidArgumentError);
  CHECK_THROWS_AS(Density::exponential(0.0), InvalidArgumentError);
  CHECK_THROWS_AS(Density::gaussian(0.0, 0.0), InvalidArgumentError);

  Eigen::ArrayXd bad(3), v(3);
  bad << 0.0, 0.0, 1.0;  // not strictly increasing
  v << 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(Density::piecewise_linear(bad, v), InvalidArgumentError);

  Eigen::ArrayXd k(2), off(2);
  k << 0.0, 1.0;
  off << 3.0, 3.0;  // integral 3, not 1
  CHECK_THROWS_AS(Density::piecewise_linear(k, off), InvalidArgumentError);
  CHECK(Density::piecewise_linear_normalized(k, off)(0.5) == doctest::Approx(1.0));
}

TEST_CASE("every family integrates to one") {
  for (const Density& f :
       {Density::uniform(-1.0, 3.0), Density::exponential(0.7, 2.0),
        Density::gaussian(-2.0, 0.5),
        Density::mixture({{0.25, Density::uniform(0.0, 1.0)},
                          {0.75, Density::gaussian(0.0, 1.0)}})}) {
    CHECK(integral_of(f) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("mass_between matches quadrature") {
  RandomStream rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Density f = mixent::testing::random_density(rng);
    const Interval w = f.integration_interval();
    const double a = rng.uniform(w.lo - 1.0, w.hi);
    const double b = a + rng.uniform(0.0, w.hi - a + 1.0);
    const double direct = f.mass_between(a, b);
    const double by_quad =
        quad::integrate([&](double y) { return f(y); }, a, b, 1e-11, f.breakpoints())
            .value;
    CHECK(direct == doctest::Approx(by_quad).epsilon(1e-8));
  }
}

TEST_CASE("sampling stays in support and matches the first moment") {
  RandomStream rng(11);
  const Density f = Density::piecewise_linear_normalized(
      (Eigen::ArrayXd(3) << 0.0, 1.0, 2.0).finished(),
      (Eigen::ArrayXd(3) << 0.0, 1.0, 0.0).finished());
  const Interval support = f.support();
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double y = f.sample(rng);
    REQUIRE(y >= support.lo);
    REQUIRE(y <= support.hi);
    sum += y;
  }
  // Triangle on [0,2]: mean 1, sd ~0.41.
  CHECK(sum / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("sampling is deterministic for a fixed seed") {
  const Density f = Density::gaussian(0.0, 1.0);
  RandomStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(f.sample(a) == f.sample(b));
}

TEST_CASE("affine images stay exact") {
  const Density u = Density::uniform(0.0, 1.0);
  const Density shifted = *u.affine_image(1.0, 3.0);
  CHECK(shifted.support().lo == doctest::Approx(3.0));
  CHECK(shifted.support().hi == doctest::Approx(4.0));
  CHECK(shifted(3.5) == doctest::Approx(1.0));

  const Density g = Density::gaussian(1.0, 2.0);
  const Density gi = *g.affine_image(-2.0, 0.5);
  const auto params = gi.gaussian_params();
  CHECK(params.mean == doctest::Approx(-1.5));
  CHECK(params.variance == doctest::Approx(8.0));

  const Density e = Density::exponential(2.0, 1.0);
  const Density ei = *e.affine_image(3.0, 0.0);
  CHECK(ei.exponential_params().rate == doctest::Approx(2.0 / 3.0));
  CHECK(ei.exponential_params().origin == doctest::Approx(3.0));
  // Reflections of exponentials leave the family.
  CHECK_FALSE(e.affine_image(-1.0, 0.0).has_value());
  CHECK_FALSE(e.affine_image(0.0, 0.0).has_value());
}

TEST_CASE("affine image is a genuine change of variables") {
  RandomStream rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Density f = mixent::testing::random_density(rng);
    const double a = rng.uniform() < 0.5 ? rng.uniform(0.3, 2.0) : -rng.uniform(0.3, 2.0);
    const double b = rng.uniform(-2.0, 2.0);
    const auto image = f.affine_image(a, b);
    if (!image) continue;
    for (int probe = 0; probe < 50; ++probe) {
      const Interval w = f.integration_interval();
      const double y = rng.uniform(w.lo, w.hi);
      CHECK((*image)(a * y + b) ==
            doctest::Approx(f(y) / std::abs(a)).epsilon(1e-9));
    }
  }
}

TEST_CASE("tabulate approximates and normalizes") {
  const Density g = Density::gaussian(0.0, 1.0);
  const Density t = Density::tabulate([&](double y) { return g(y); },
                                      g.integration_interval(), 4096);
  CHECK(integral_of(t) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(t(0.3) == doctest::Approx(g(0.3)).epsilon(1e-4));
}

TEST_CASE("integration interval captures the tail mass") {
  for (const Density& f : {Density::exponential(1.5, -2.0), Density::gaussian(3.0, 2.0)}) {
    const Interval w = f.integration_interval(1e-12);
    CHECK(f.mass_between(w.lo, w.hi) == doctest::Approx(1.0).epsilon(1e-11));
  }
}
