#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "corpus.hpp"
#include "mixent/entropy.hpp"
#include "mixent/errors.hpp"
#include "mixent/goodness.hpp"

using namespace mixent;

namespace {

MixedPairDistribution fair_coin() {
  return inject_discrete({{Label{std::int64_t{0}}, 0.5}, {Label{std::int64_t{1}}, 0.5}});
}

// Half-Cauchy lookalike: normalized on [0, inf) but with no first moment.
MixedPairDistribution heavy_tail() {
  const Density cauchy = Density::custom(
      [](double y) { return (2.0 / M_PI) / (1.0 + y * y); },
      {0.0, std::numeric_limits<double>::infinity()});
  return inject_continuous(cauchy);
}

}  // namespace

TEST_CASE("fractional moments") {
  CHECK(epsilon_moment(inject_continuous(Density::uniform(0, 1)), 1.0) ==
        doctest::Approx(0.5).epsilon(1e-9));
  // int_0^2 y^2 * 1/2 dy = 4/3
  CHECK(epsilon_moment(inject_continuous(Density::uniform(0, 2)), 2.0) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-9));
  // mean of exponential(1)
  CHECK(epsilon_moment(inject_continuous(Density::exponential(1.0)), 1.0) ==
        doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(epsilon_moment(fair_coin(), 0.0), InvalidArgumentError);
}

TEST_CASE("power integrals") {
  CHECK(power_integral(inject_continuous(Density::uniform(0, 1)), 1.0) ==
        doctest::Approx(1.0).epsilon(1e-9));
  // int_0^2 (1/2)^2 dy = 1/2
  CHECK(power_integral(inject_continuous(Density::uniform(0, 2)), 1.0) ==
        doctest::Approx(0.5).epsilon(1e-9));
  // int phi^2 = 1/(2 sqrt(pi))
  CHECK(power_integral(inject_continuous(Density::gaussian(0, 1)), 1.0) ==
        doctest::Approx(1.0 / (2.0 * std::sqrt(M_PI))).epsilon(1e-8));
}

TEST_CASE("discrete entropy of the atom masses") {
  CHECK(discrete_entropy(fair_coin()) == doctest::Approx(std::log(2.0)));
  CHECK(discrete_entropy(inject_continuous(Density::uniform(0, 1))) == 0.0);
  const auto skewed =
      inject_discrete({{Label{std::int64_t{0}}, 0.9}, {Label{std::int64_t{1}}, 0.1}});
  CHECK(discrete_entropy(skewed) ==
        doctest::Approx(-(0.9 * std::log(0.9) + 0.1 * std::log(0.1))).epsilon(1e-12));
}

TEST_CASE("normalizing constant against the closed form") {
  // 1 / int exp(-|y|^eps) dy = 1 / (2 Gamma(1 + 1/eps))
  for (double eps : {1.0, 2.0, 0.5}) {
    const double closed = 1.0 / (2.0 * std::tgamma(1.0 + 1.0 / eps));
    CHECK(normalizing_constant_c(eps) == doctest::Approx(closed).epsilon(1e-9));
  }
  CHECK(normalizing_constant_c(1.0) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(normalizing_constant_c(2.0) ==
        doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-10));
  CHECK(normalizing_constant_c(0.5) == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("log threshold") {
  CHECK(log_threshold_b(1.0) == 1.0);

  // log x <= sqrt(x) already holds on [1, inf): the threshold collapses to 1.
  const double b_half = log_threshold_b(0.5);
  CHECK(b_half == 1.0);

  const double b_tenth = log_threshold_b(0.1);
  CHECK(b_tenth > 100.0);
  // At the returned threshold the two sides cross.
  CHECK(std::abs(std::log(b_tenth) - std::pow(b_tenth, 0.1)) <=
        1e-9 * std::pow(b_tenth, 0.1));

  // The defining inequality holds at 1e3 probe points above every threshold.
  for (double delta : {1.0, 0.5, 0.1, 0.05}) {
    const double b = log_threshold_b(delta);
    for (int k = 0; k < 1000; ++k) {
      const double x = b * (1.0 + static_cast<double>(k));
      CHECK(std::log(x) <= std::pow(x, delta) + 1e-12 * std::pow(x, delta));
    }
  }
}

TEST_CASE("goodness report assembles the appendix bound") {
  const auto coin = fair_coin();
  const GoodnessReport report = goodness_check(coin, 1.0, 1.0);
  CHECK(report.passed);
  const double expected = discrete_entropy(coin) +
                          std::abs(std::log(normalizing_constant_c(1.0))) +
                          epsilon_moment(coin, 1.0) + std::log(log_threshold_b(1.0)) +
                          power_integral(coin, 1.0);
  CHECK(report.magnitude_bound == doctest::Approx(expected).epsilon(1e-12));
  CHECK(report.B_delta == 1.0);
  CHECK(report.C_epsilon == doctest::Approx(0.5).epsilon(1e-10));

  CHECK(goodness_check(inject_continuous(Density::gaussian(0, 1)), 2.0, 1.0).passed);

  const GoodnessReport u01 = goodness_check(inject_continuous(Density::uniform(0, 1)));
  CHECK(u01.passed);
  CHECK(u01.magnitude_bound >= 0.0);
}

TEST_CASE("term magnitudes stay under the bound") {
  for (const auto& dist : mixent::testing::corpus(10, 77)) {
    const GoodnessReport report = goodness_check(dist, 1.0, 1.0);
    REQUIRE(report.passed);
    MixedEntropyOptions options;
    const EntropyResult entropy = mixed_entropy(dist, options);
    double magnitude = 0.0;
    for (double term : entropy.terms) magnitude += std::abs(term);
    CHECK(magnitude <= report.magnitude_bound + 1e-6);
  }
}

TEST_CASE("certificates survive epsilon shrinking on compact supports") {
  RandomStream rng(5);
  for (int c = 0; c < 5; ++c) {
    // compact: uniform / piecewise-linear atoms only
    std::vector<Atom> atoms;
    const auto masses = mixent::testing::random_pmf(3, rng);
    for (int i = 0; i < 3; ++i) {
      Density f = Density::uniform(-1.0 + i, 1.0 + i);
      atoms.push_back({Label{std::int64_t{i}}, masses[i], f});
    }
    const MixedPairDistribution dist(std::move(atoms));
    for (double eps : {1.0, 0.5, 0.1, 0.01}) {
      CHECK(goodness_check(dist, eps, 1.0).passed);
    }
  }
}

TEST_CASE("divergent moments fail the certificate rather than throwing") {
  const auto dist = heavy_tail();
  CHECK_THROWS_AS(epsilon_moment(dist, 1.0), DivergentIntegralError);
  const GoodnessReport report = goodness_check(dist, 1.0, 1.0);
  CHECK_FALSE(report.passed);
  CHECK_FALSE(report.failure.empty());
}
