#include "mixent/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mixent/errors.hpp"

namespace mixent {

std::string to_string(const Label& label) {
  if (std::holds_alternative<std::int64_t>(label)) {
    return std::to_string(std::get<std::int64_t>(label));
  }
  return std::get<std::string>(label);
}

MixedPairDistribution::MixedPairDistribution(std::vector<Atom> atoms,
                                             double tail_mass)
    : atoms_(std::move(atoms)), tail_mass_(tail_mass) {
  if (atoms_.empty()) {
    throw InvalidArgumentError("distribution needs at least one atom");
  }
  if (tail_mass_ < 0.0 || tail_mass_ >= 1.0) {
    throw InvalidArgumentError("truncation tail mass must lie in [0, 1)");
  }
  double total = tail_mass_;
  std::set<std::string> seen;
  for (const Atom& atom : atoms_) {
    if (!(atom.mass > 0.0)) {
      throw InvalidArgumentError("atom masses must be strictly positive");
    }
    if (!seen.insert(to_string(atom.label)).second) {
      throw InvalidArgumentError("atom labels must be pairwise distinct: " +
                                 to_string(atom.label));
    }
    total += atom.mass;
    tabulated_ = tabulated_ || atom.shape.tabulated();
  }
  const double tol = tabulated_ ? 1e-6 : 1e-9;
  if (std::abs(total - 1.0) > tol) {
    throw InvalidArgumentError("atom masses must sum to 1 (got " +
                               std::to_string(total) + ")");
  }
}

const Atom& MixedPairDistribution::atom(std::size_t i) const {
  if (i >= atoms_.size()) throw InvalidArgumentError("atom index out of range");
  return atoms_[i];
}

double MixedPairDistribution::atom_mass(std::size_t i) const {
  return atom(i).mass;
}

double MixedPairDistribution::marginal_density(double y) const {
  double g = 0.0;
  for (const Atom& atom : atoms_) g += atom.mass * atom.shape(y);
  return g;
}

double MixedPairDistribution::sub_density(std::size_t i, double y) const {
  const Atom& a = atom(i);
  return a.mass * a.shape(y);
}

std::vector<double> MixedPairDistribution::posterior_weights(double y) const {
  std::vector<double> g(atoms_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    g[i] = atoms_[i].mass * atoms_[i].shape(y);
    total += g[i];
  }
  if (!(total > 0.0)) {
    throw UndefinedPosteriorError("posterior weights undefined where g(y) = 0");
  }
  for (double& v : g) v /= total;
  return g;
}

const Density& MixedPairDistribution::conditional_density(std::size_t i) const {
  return atom(i).shape;
}

std::pair<Label, double> MixedPairDistribution::sample(RandomStream& rng) const {
  const auto [index, y] = sample_indexed(rng);
  return {atoms_[index].label, y};
}

std::pair<std::size_t, double> MixedPairDistribution::sample_indexed(
    RandomStream& rng) const {
  double u = rng.uniform();
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (u < atoms_[i].mass) return {i, atoms_[i].shape.sample(rng)};
    u -= atoms_[i].mass;
  }
  return {atoms_.size() - 1, atoms_.back().shape.sample(rng)};
}

Interval MixedPairDistribution::integration_interval(double tail_mass) const {
  Interval hull{std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity()};
  for (const Atom& atom : atoms_) {
    const Interval ai = atom.shape.integration_interval(tail_mass);
    hull.lo = std::min(hull.lo, ai.lo);
    hull.hi = std::max(hull.hi, ai.hi);
  }
  return hull;
}

std::vector<double> MixedPairDistribution::breakpoints() const {
  std::vector<double> all;
  for (const Atom& atom : atoms_) {
    auto b = atom.shape.breakpoints();
    all.insert(all.end(), b.begin(), b.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

MixedPairDistribution inject_discrete(
    const std::vector<std::pair<Label, double>>& pmf) {
  if (pmf.empty()) throw InvalidArgumentError("pmf must be nonempty");
  std::vector<Atom> atoms;
  atoms.reserve(pmf.size());
  const Density unit = Density::uniform(0.0, 1.0);
  for (const auto& [label, p] : pmf) {
    if (!(p > 0.0)) throw InvalidArgumentError("pmf probabilities must be positive");
    atoms.push_back({label, p, unit});
  }
  return MixedPairDistribution(std::move(atoms));
}

MixedPairDistribution inject_continuous(const Density& density) {
  return MixedPairDistribution({Atom{Label{std::int64_t{0}}, 1.0, density}});
}

MixedPairDistribution inject_mixed(
    const std::vector<std::pair<Label, double>>& discrete_part,
    double continuous_mass, const Density& continuous_density) {
  std::vector<Atom> atoms;
  const Density unit = Density::uniform(0.0, 1.0);
  for (const auto& [label, p] : discrete_part) {
    if (label == kContinuousPartLabel) {
      throw InvalidArgumentError("label '" + to_string(kContinuousPartLabel) +
                                 "' is reserved for the continuous part");
    }
    if (!(p > 0.0)) throw InvalidArgumentError("pmf probabilities must be positive");
    atoms.push_back({label, p, unit});
  }
  if (continuous_mass > 0.0) {
    atoms.push_back({kContinuousPartLabel, continuous_mass, continuous_density});
  }
  if (atoms.empty()) {
    throw InvalidArgumentError("discrete and continuous parts both empty");
  }
  return MixedPairDistribution(std::move(atoms));
}

}  // namespace mixent
