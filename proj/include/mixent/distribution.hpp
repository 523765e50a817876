#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "mixent/density.hpp"
#include "mixent/random.hpp"

namespace mixent {

// Discrete atom label: exact integer or string, compared by equality.
using Label = std::variant<std::int64_t, std::string>;

std::string to_string(const Label& label);

// Reserved label attached to the continuous part when a discrete-continuous
// variable is lifted into an (atom, density) pair.
inline const Label kContinuousPartLabel{std::string("cont")};

// One atom: discrete value x, mass p = P(X = x), and the normalized density
// of Y given X = x. The unnormalized sub-density is mass * shape.
struct Atom {
  Label label;
  double mass = 0.0;
  Density shape;
};

// Finite mixed-pair distribution: a discrete coordinate over the atom labels
// and an absolutely continuous coordinate described per atom. Immutable after
// construction; all evaluation is pure.
class MixedPairDistribution {
 public:
  // Validates: masses positive, labels distinct, sum of masses + tail_mass
  // equal to 1 within 1e-9 (1e-6 when any shape is tabulated). `tail_mass`
  // records what the caller truncated away from a countably infinite atom
  // set; computations run on the finite part.
  explicit MixedPairDistribution(std::vector<Atom> atoms, double tail_mass = 0.0);

  std::size_t size() const { return atoms_.size(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const Atom& atom(std::size_t i) const;
  double truncation_tail_mass() const { return tail_mass_; }
  bool tabulated() const { return tabulated_; }

  // p_i, the stored mass (construction guarantees it matches the integral of
  // the sub-density; cross-checked by quadrature in the test suite).
  double atom_mass(std::size_t i) const;

  // g(y) = sum_i g_i(y); 0 outside every support.
  double marginal_density(double y) const;

  // Sub-density g_i(y) = mass_i * shape_i(y).
  double sub_density(std::size_t i, double y) const;

  // (p_i(y))_i = (g_i(y)/g(y))_i; throws UndefinedPosteriorError at g(y)=0.
  std::vector<double> posterior_weights(double y) const;

  // Normalized density of Y given X = x_i.
  const Density& conditional_density(std::size_t i) const;

  // Atom draw by mass, then a draw from the atom's conditional density.
  std::pair<Label, double> sample(RandomStream& rng) const;

  // Same draw, exposing the atom index instead of the label.
  std::pair<std::size_t, double> sample_indexed(RandomStream& rng) const;

  // Finite window covering every atom's integration interval.
  Interval integration_interval(double tail_mass = 1e-12) const;

  // Union of atom breakpoints, sorted, deduplicated.
  std::vector<double> breakpoints() const;

 private:
  std::vector<Atom> atoms_;
  double tail_mass_ = 0.0;
  bool tabulated_ = false;
};

// Lift of a discrete pmf: every atom keeps its probability and gets an
// independent uniform[0,1] conditional density, so the pair's entropy equals
// the discrete entropy of the pmf.
MixedPairDistribution inject_discrete(const std::vector<std::pair<Label, double>>& pmf);

// Lift of a continuous density: one atom of mass 1 carrying the density.
MixedPairDistribution inject_continuous(const Density& density);

// Lift of a discrete-continuous variable: discrete values become uniform[0,1]
// atoms; the continuous remainder becomes one extra atom under the reserved
// label, carrying its normalized density.
MixedPairDistribution inject_mixed(
    const std::vector<std::pair<Label, double>>& discrete_part,
    double continuous_mass, const Density& continuous_density);

}  // namespace mixent
