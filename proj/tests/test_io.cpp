#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "mixent/entropy.hpp"
#include "mixent/errors.hpp"
#include "mixent/io.hpp"

using namespace mixent;

namespace {

const char* kFairCoin = R"({
  "atoms": [
    {"label": "H", "mass": 0.5, "density": {"family": "uniform", "a": 0.0, "b": 1.0}},
    {"label": "T", "mass": 0.5, "density": {"family": "uniform", "a": 0.0, "b": 1.0}}
  ]
})";

}  // namespace

TEST_CASE("distribution parsing") {
  const auto coin = io::parse_distribution(kFairCoin);
  REQUIRE(coin.size() == 2);
  CHECK(coin.atom(0).label == Label{std::string("H")});
  CHECK(coin.atom_mass(0) == 0.5);

  const auto all_families = io::parse_distribution(R"({
    "atoms": [
      {"label": 0, "mass": 0.25, "density": {"family": "uniform", "a": -1, "b": 1}},
      {"label": 1, "mass": 0.25, "density": {"family": "exponential", "rate": 2.0}},
      {"label": 2, "mass": 0.25, "density": {"family": "gaussian", "mean": 0, "variance": 1}},
      {"label": 3, "mass": 0.25,
       "density": {"family": "piecewise-linear", "knots": [[0, 0], [1, 0.5], [2, 0.5], [3, 0]]}}
    ]
  })");
  CHECK(all_families.size() == 4);
  CHECK(all_families.atom(1).shape.family() == Density::Family::Exponential);
  CHECK(all_families.atom(3).shape(1.5) == doctest::Approx(0.5));
  CHECK(all_families.atom(3).shape(0.5) == doctest::Approx(0.25));

  // exponential support sets the origin
  const auto shifted = io::parse_distribution(R"({
    "atoms": [{"label": 0, "mass": 1.0,
               "density": {"family": "exponential", "rate": 1.0, "support": [3.0, null]}}]
  })");
  CHECK(shifted.atom(0).shape(2.9) == 0.0);
  CHECK(shifted.atom(0).shape(3.0) == doctest::Approx(1.0));
}

TEST_CASE("distribution parse rejections") {
  // unknown family
  CHECK_THROWS_AS(io::parse_distribution(R"({
    "atoms": [{"label": 0, "mass": 1.0, "density": {"family": "beta", "a": 1, "b": 1}}]
  })"),
                  ParseError);
  // masses off by 1e-6 (tolerance is 1e-9)
  CHECK_THROWS_AS(io::parse_distribution(R"({
    "atoms": [{"label": 0, "mass": 1.000001,
               "density": {"family": "uniform", "a": 0, "b": 1}}]
  })"),
                  ParseError);
  // non-integer numeric label
  CHECK_THROWS_AS(io::parse_distribution(R"({
    "atoms": [{"label": 1.5, "mass": 1.0, "density": {"family": "uniform", "a": 0, "b": 1}}]
  })"),
                  ParseError);
  // malformed JSON
  CHECK_THROWS_AS(io::parse_distribution("{"), ParseError);
  // missing fields
  CHECK_THROWS_AS(io::parse_distribution(R"({"atoms": [{"mass": 1.0}]})"), ParseError);
  CHECK_THROWS_AS(io::parse_distribution(R"({"atoms": []})"), ParseError);
}

TEST_CASE("distribution serialization round trip") {
  const auto coin = io::parse_distribution(kFairCoin);
  const std::string text = io::distribution_to_json(coin);
  const auto again = io::parse_distribution(text);
  REQUIRE(again.size() == coin.size());
  for (std::size_t i = 0; i < coin.size(); ++i) {
    CHECK(again.atom(i).label == coin.atom(i).label);
    CHECK(again.atom_mass(i) == doctest::Approx(coin.atom_mass(i)).epsilon(1e-12));
  }
  CHECK(mixed_entropy(again).value ==
        doctest::Approx(mixed_entropy(coin).value).epsilon(1e-10));
}

TEST_CASE("map parsing") {
  const auto map = io::parse_map(R"({
    "regions": [
      {"input_label": 0, "interval": [0.0, 1.0], "output_label": 0,
       "map": {"type": "affine", "slope": 1.0, "intercept": 0.0}},
      {"input_label": 0, "interval": [1.0, 2.0], "output_label": 1,
       "map": {"type": "affine", "slope": 1.0, "intercept": -1.0}}
    ]
  })");
  const auto [label, y] = map.apply(Label{std::int64_t{0}}, 1.5);
  CHECK(label == Label{std::int64_t{1}});
  CHECK(y == doctest::Approx(0.5));

  const auto warped = io::parse_map(R"({
    "regions": [
      {"input_label": "a", "interval": [0.0, 1.0], "output_label": "b",
       "map": {"type": "tabulated", "knots": [[0.0, 0.0], [0.5, 0.7], [1.0, 1.0]]}}
    ]
  })");
  CHECK(warped.apply(Label{std::string("a")}, 0.5).second == doctest::Approx(0.7));

  CHECK_THROWS_AS(io::parse_map(R"({"regions": [{"input_label": 0,
    "interval": [0, 1], "output_label": 0, "map": {"type": "cubic"}}]})"),
                  ParseError);
  CHECK_THROWS_AS(io::parse_map(R"({"no_regions": true})"), ParseError);
}

TEST_CASE("chain parsing") {
  const auto spec = io::parse_chain(R"({
    "lambda": 2.0,
    "P": [[0.5, 0.5], [0.5, 0.5]],
    "stationary": true
  })");
  CHECK(spec.lambda == 2.0);
  CHECK(spec.stationary_start);
  CHECK(spec.initial[0] == doctest::Approx(0.5));

  const auto explicit_start = io::parse_chain(R"({
    "lambda": 1.0,
    "P": [[0.9, 0.1], [0.2, 0.8]],
    "initial": [1.0, 0.0]
  })");
  CHECK_FALSE(explicit_start.stationary_start);
  CHECK(explicit_start.initial[0] == 1.0);

  // rows not stochastic
  CHECK_THROWS_AS(io::parse_chain(R"({"lambda": 1.0, "P": [[0.5, 0.4], [0.5, 0.5]],
    "stationary": true})"),
                  ParseError);
  // non-square
  CHECK_THROWS_AS(io::parse_chain(R"({"lambda": 1.0, "P": [[0.5, 0.5]],
    "stationary": true})"),
                  ParseError);
  // neither initial nor stationary
  CHECK_THROWS_AS(io::parse_chain(R"({"lambda": 1.0, "P": [[1.0]]})"), ParseError);
}

TEST_CASE("samples csv") {
  const std::string path = "/tmp/mixent_test_samples.csv";
  {
    std::ofstream out(path);
    out << "0.5\n1.25\n\n-3.5e-1\n";
  }
  const auto values = io::load_samples_csv(path);
  REQUIRE(values.size() == 3);
  CHECK(values[1] == 1.25);
  CHECK(values[2] == -0.35);

  {
    std::ofstream out(path);
    out << "0.5\nnot-a-number\n";
  }
  CHECK_THROWS_AS(io::load_samples_csv(path), ParseError);
  CHECK_THROWS_AS(io::load_samples_csv("/nonexistent/file.csv"), ParseError);
}

TEST_CASE("label csv keeps integers exact") {
  const std::string path = "/tmp/mixent_test_labels.csv";
  {
    std::ofstream out(path);
    out << "12\nheads\n-3\n";
  }
  const auto labels = io::load_labels_csv(path);
  REQUIRE(labels.size() == 3);
  CHECK(labels[0] == Label{std::int64_t{12}});
  CHECK(labels[1] == Label{std::string("heads")});
  CHECK(labels[2] == Label{std::int64_t{-3}});
}

TEST_CASE("path export") {
  SamplePath path;
  path.horizon = 10.0;
  path.jumps = {0.5, 1.25};
  path.marks = {1, 0};
  std::ostringstream out;
  io::write_path_csv(out, path);
  CHECK(out.str() == "time,mark\n0.5,1\n1.25,0\n");

  SamplePath unmarked;
  unmarked.horizon = 1.0;
  unmarked.jumps = {0.25};
  std::ostringstream bare;
  io::write_path_csv(bare, unmarked);
  CHECK(bare.str() == "time,mark\n0.25,\n");
}
