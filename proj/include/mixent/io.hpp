#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mixent/distribution.hpp"
#include "mixent/processes.hpp"
#include "mixent/transform.hpp"

namespace mixent::io {

// Distribution spec document:
//   {"atoms": [{"label": 0, "mass": 0.5,
//               "density": {"family": "uniform", "a": 0, "b": 1}}, ...],
//    "tail_mass": 0.0}
// Families: uniform(a,b), exponential(rate[,origin]), gaussian(mean,variance),
// piecewise-linear(knots=[[y,value],...]); optional "support": [lo, hi] with
// null for an unbounded end. Unknown families are rejected; atom masses must
// sum to 1 within 1e-9.
MixedPairDistribution parse_distribution(const std::string& text);
MixedPairDistribution load_distribution(const std::string& path);
std::string distribution_to_json(const MixedPairDistribution& dist);

// Map spec document:
//   {"regions": [{"input_label": 0, "interval": [0, 1], "output_label": 0,
//                 "map": {"type": "affine", "slope": 1, "intercept": 0}},
//                ...]}
// Map types: affine{slope,intercept}, tabulated{knots=[[x,F(x)],...]}.
MixedPairMap parse_map(const std::string& text);
MixedPairMap load_map(const std::string& path);

// Chain spec document:
//   {"lambda": 2.0, "P": [[0.5, 0.5], [0.5, 0.5]], "stationary": true}
// or with "initial": [p0, p1, ...] instead of the stationary flag.
CTMCSpec parse_chain(const std::string& text);
CTMCSpec load_chain(const std::string& path);

// One value per line; blank lines ignored.
std::vector<double> load_samples_csv(const std::string& path);
// Labels: integers stay exact, anything else is a string.
std::vector<Label> load_labels_csv(const std::string& path);

// CSV with header "time,mark"; the mark column is empty for unmarked paths.
void write_path_csv(std::ostream& out, const SamplePath& path);

}  // namespace mixent::io
