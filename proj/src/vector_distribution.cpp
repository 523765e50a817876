#include "mixent/vector_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "mixent/errors.hpp"

namespace mixent {
namespace {

double grid_trapezoid_integral(const Eigen::ArrayXd& xs, const Eigen::ArrayXd& ys,
                               const Eigen::MatrixXd& v) {
  double total = 0.0;
  for (Eigen::Index i = 0; i + 1 < xs.size(); ++i) {
    for (Eigen::Index j = 0; j + 1 < ys.size(); ++j) {
      const double area = (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
      total += 0.25 * area *
               (v(i, j) + v(i + 1, j) + v(i, j + 1) + v(i + 1, j + 1));
    }
  }
  return total;
}

void check_axis(const Eigen::ArrayXd& t, const char* name) {
  if (t.size() < 2) throw InvalidArgumentError(std::string(name) + " axis needs >= 2 knots");
  for (Eigen::Index i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) {
      throw InvalidArgumentError(std::string(name) + " axis knots must be strictly increasing");
    }
  }
}

// Trapezoid weights for integrating tabulated values along an axis.
Eigen::VectorXd trapezoid_weights(const Eigen::ArrayXd& t) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(t.size());
  for (Eigen::Index i = 0; i + 1 < t.size(); ++i) {
    const double h = 0.5 * (t[i + 1] - t[i]);
    w[i] += h;
    w[i + 1] += h;
  }
  return w;
}

std::string label_key(const std::vector<Label>& label) {
  std::string key;
  for (const Label& l : label) {
    key += to_string(l);
    key += '\x1f';
  }
  return key;
}

}  // namespace

VectorDensity VectorDensity::product(std::vector<Density> parts) {
  if (parts.empty()) throw InvalidArgumentError("product density needs >= 1 factor");
  VectorDensity d;
  d.dim_ = static_cast<int>(parts.size());
  d.kind_ = Kind::Product;
  d.parts_ = std::move(parts);
  return d;
}

VectorDensity VectorDensity::grid2d(Eigen::ArrayXd xs, Eigen::ArrayXd ys,
                                    Eigen::MatrixXd values) {
  check_axis(xs, "x");
  check_axis(ys, "y");
  if (values.rows() != xs.size() || values.cols() != ys.size()) {
    throw InvalidArgumentError("grid values shape must be (x knots) x (y knots)");
  }
  if ((values.array() < 0.0).any()) {
    throw InvalidArgumentError("grid values must be nonnegative");
  }
  const double total = grid_trapezoid_integral(xs, ys, values);
  if (std::abs(total - 1.0) > 1e-6) {
    throw InvalidArgumentError("grid density does not integrate to 1");
  }
  VectorDensity d;
  d.dim_ = 2;
  d.kind_ = Kind::Grid2d;
  d.grid_ = std::make_shared<const Grid>(Grid{std::move(xs), std::move(ys), std::move(values)});
  return d;
}

VectorDensity VectorDensity::grid2d_normalized(Eigen::ArrayXd xs, Eigen::ArrayXd ys,
                                               Eigen::MatrixXd values) {
  check_axis(xs, "x");
  check_axis(ys, "y");
  const double total = grid_trapezoid_integral(xs, ys, values);
  if (!(total > 0.0)) throw InvalidArgumentError("grid density is identically zero");
  values /= total;
  return grid2d(std::move(xs), std::move(ys), std::move(values));
}

VectorDensity VectorDensity::custom(
    int dim, std::function<double(const Eigen::VectorXd&)> evaluator,
    std::vector<Interval> box, std::vector<std::vector<double>> axis_breakpoints) {
  if (dim < 1) throw InvalidArgumentError("custom density dimension must be >= 1");
  if (!evaluator) throw InvalidArgumentError("custom density needs an evaluator");
  if (static_cast<int>(box.size()) != dim) {
    throw InvalidArgumentError("custom density box must match dimension");
  }
  if (axis_breakpoints.empty()) axis_breakpoints.resize(dim);
  VectorDensity d;
  d.dim_ = dim;
  d.kind_ = Kind::Custom;
  d.custom_ = std::make_shared<const Custom>(
      Custom{std::move(evaluator), std::move(box), std::move(axis_breakpoints)});
  return d;
}

bool VectorDensity::tabulated() const {
  switch (kind_) {
    case Kind::Grid2d: return true;
    case Kind::Product:
      return std::any_of(parts_.begin(), parts_.end(),
                         [](const Density& p) { return p.tabulated(); });
    default: return false;
  }
}

double VectorDensity::operator()(const Eigen::VectorXd& y) const {
  switch (kind_) {
    case Kind::Product: {
      double v = 1.0;
      for (int i = 0; i < dim_; ++i) {
        v *= parts_[i](y[i]);
        if (v == 0.0) return 0.0;
      }
      return v;
    }
    case Kind::Grid2d: {
      const Grid& g = *grid_;
      const double x = y[0], t = y[1];
      if (x < g.xs[0] || x > g.xs[g.xs.size() - 1] || t < g.ys[0] ||
          t > g.ys[g.ys.size() - 1]) {
        return 0.0;
      }
      auto cell = [](const Eigen::ArrayXd& axis, double v) -> Eigen::Index {
        auto it = std::upper_bound(axis.data(), axis.data() + axis.size(), v);
        return std::clamp<Eigen::Index>(it - axis.data() - 1, 0, axis.size() - 2);
      };
      const Eigen::Index i = cell(g.xs, x);
      const Eigen::Index j = cell(g.ys, t);
      const double u = (x - g.xs[i]) / (g.xs[i + 1] - g.xs[i]);
      const double w = (t - g.ys[j]) / (g.ys[j + 1] - g.ys[j]);
      return (1 - u) * (1 - w) * g.values(i, j) + u * (1 - w) * g.values(i + 1, j) +
             (1 - u) * w * g.values(i, j + 1) + u * w * g.values(i + 1, j + 1);
    }
    default:
      for (int i = 0; i < dim_; ++i) {
        if (!custom_->box[i].contains(y[i])) return 0.0;
      }
      return std::max(0.0, custom_->fn(y));
  }
}

Interval VectorDensity::axis_interval(int axis, double tail_mass) const {
  switch (kind_) {
    case Kind::Product:
      return parts_[axis].integration_interval(tail_mass / dim_);
    case Kind::Grid2d: {
      const Eigen::ArrayXd& t = axis == 0 ? grid_->xs : grid_->ys;
      return {t[0], t[t.size() - 1]};
    }
    default:
      return custom_->box[axis];
  }
}

std::vector<double> VectorDensity::axis_breakpoints(int axis) const {
  switch (kind_) {
    case Kind::Product:
      return parts_[axis].breakpoints();
    case Kind::Grid2d: {
      const Eigen::ArrayXd& t = axis == 0 ? grid_->xs : grid_->ys;
      return {t.data(), t.data() + t.size()};
    }
    default:
      return axis < static_cast<int>(custom_->breaks.size()) ? custom_->breaks[axis]
                                                             : std::vector<double>{};
  }
}

VectorDensity VectorDensity::marginal(const std::vector<int>& keep) const {
  if (keep.empty() || static_cast<int>(keep.size()) >= dim_ + 1) {
    throw InvalidArgumentError("marginal axis list must be a nonempty subset");
  }
  for (int axis : keep) {
    if (axis < 0 || axis >= dim_) throw InvalidArgumentError("marginal axis out of range");
  }
  if (static_cast<int>(keep.size()) == dim_) return *this;

  switch (kind_) {
    case Kind::Product: {
      std::vector<Density> kept;
      kept.reserve(keep.size());
      for (int axis : keep) kept.push_back(parts_[axis]);
      return product(std::move(kept));
    }
    case Kind::Grid2d: {
      // Integrating a bilinear cell over one axis is exact trapezoid work:
      // the result is piecewise linear on the other axis.
      const Grid& g = *grid_;
      const int kept_axis = keep[0];
      const Eigen::ArrayXd& kept_knots = kept_axis == 0 ? g.xs : g.ys;
      const Eigen::VectorXd w = trapezoid_weights(kept_axis == 0 ? g.ys : g.xs);
      Eigen::ArrayXd values;
      if (kept_axis == 0) {
        values = (g.values * w).array();
      } else {
        values = (g.values.transpose() * w).array();
      }
      return product({Density::piecewise_linear_normalized(kept_knots, values)});
    }
    default:
      throw InvalidArgumentError("cannot marginalize a custom vector density");
  }
}

Eigen::VectorXd VectorDensity::sample(RandomStream& rng) const {
  if (kind_ != Kind::Product) {
    throw InvalidArgumentError("sampling implemented for product densities only");
  }
  Eigen::VectorXd y(dim_);
  for (int i = 0; i < dim_; ++i) y[i] = parts_[i].sample(rng);
  return y;
}

const std::vector<Density>& VectorDensity::parts() const {
  if (kind_ != Kind::Product) {
    throw InvalidArgumentError("parts() only defined for product densities");
  }
  return parts_;
}

MixedPairVectorDistribution::MixedPairVectorDistribution(
    std::vector<VectorAtom> atoms, double tail_mass)
    : atoms_(std::move(atoms)), tail_mass_(tail_mass) {
  if (atoms_.empty()) throw InvalidArgumentError("distribution needs at least one atom");
  dim_ = atoms_.front().density.dim();
  double total = tail_mass_;
  std::set<std::string> seen;
  for (const VectorAtom& atom : atoms_) {
    if (static_cast<int>(atom.label.size()) != dim_ || atom.density.dim() != dim_) {
      throw InvalidArgumentError("all atoms must share the same dimension");
    }
    if (!(atom.mass > 0.0)) {
      throw InvalidArgumentError("atom masses must be strictly positive");
    }
    if (!seen.insert(label_key(atom.label)).second) {
      throw InvalidArgumentError("atom label tuples must be pairwise distinct");
    }
    total += atom.mass;
    tabulated_ = tabulated_ || atom.density.tabulated();
  }
  const double tol = tabulated_ ? 1e-6 : 1e-9;
  if (std::abs(total - 1.0) > tol) {
    throw InvalidArgumentError("atom masses must sum to 1");
  }
}

const VectorAtom& MixedPairVectorDistribution::atom(std::size_t i) const {
  if (i >= atoms_.size()) throw InvalidArgumentError("atom index out of range");
  return atoms_[i];
}

MixedPairVectorDistribution marginal(const MixedPairVectorDistribution& dist,
                                     std::vector<int> keep) {
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());

  struct Group {
    std::vector<Label> label;
    double mass = 0.0;
    std::vector<std::pair<double, VectorDensity>> components;
  };
  std::map<std::string, Group> groups;
  for (const VectorAtom& atom : dist.atoms()) {
    std::vector<Label> projected;
    projected.reserve(keep.size());
    for (int axis : keep) projected.push_back(atom.label[axis]);
    Group& group = groups[label_key(projected)];
    group.label = projected;
    group.mass += atom.mass;
    group.components.emplace_back(atom.mass, atom.density.marginal(keep));
  }

  std::vector<VectorAtom> atoms;
  atoms.reserve(groups.size());
  for (auto& [key, group] : groups) {
    if (group.components.size() == 1) {
      atoms.push_back({group.label, group.mass, group.components[0].second});
      continue;
    }
    // Merged atoms: mixture of the per-atom marginals, mass-weighted.
    const int d = static_cast<int>(keep.size());
    std::vector<Interval> box(d, {std::numeric_limits<double>::infinity(),
                                  -std::numeric_limits<double>::infinity()});
    std::vector<std::vector<double>> breaks(d);
    for (const auto& [w, comp] : group.components) {
      for (int axis = 0; axis < d; ++axis) {
        const Interval ai = comp.axis_interval(axis);
        box[axis].lo = std::min(box[axis].lo, ai.lo);
        box[axis].hi = std::max(box[axis].hi, ai.hi);
        auto ab = comp.axis_breakpoints(axis);
        breaks[axis].insert(breaks[axis].end(), ab.begin(), ab.end());
      }
    }
    for (auto& b : breaks) {
      std::sort(b.begin(), b.end());
      b.erase(std::unique(b.begin(), b.end()), b.end());
    }
    const double total = group.mass;
    auto components = std::make_shared<std::vector<std::pair<double, VectorDensity>>>(
        std::move(group.components));
    auto evaluator = [components, total](const Eigen::VectorXd& y) {
      double v = 0.0;
      for (const auto& [w, comp] : *components) v += w * comp(y);
      return v / total;
    };
    atoms.push_back({group.label, group.mass,
                     VectorDensity::custom(d, evaluator, std::move(box), std::move(breaks))});
  }
  return MixedPairVectorDistribution(std::move(atoms),
                                     dist.truncation_tail_mass());
}

MixedPairVectorDistribution independent_join(const MixedPairDistribution& a,
                                             const MixedPairDistribution& b) {
  std::vector<VectorAtom> atoms;
  atoms.reserve(a.size() * b.size());
  for (const Atom& atom_a : a.atoms()) {
    for (const Atom& atom_b : b.atoms()) {
      atoms.push_back({{atom_a.label, atom_b.label},
                       atom_a.mass * atom_b.mass,
                       VectorDensity::product({atom_a.shape, atom_b.shape})});
    }
  }
  const double tail = 1.0 - (1.0 - a.truncation_tail_mass()) *
                                (1.0 - b.truncation_tail_mass());
  return MixedPairVectorDistribution(std::move(atoms), tail);
}

MixedPairVectorDistribution inject_discrete_vector(
    const std::vector<std::pair<std::vector<Label>, double>>& pmf) {
  if (pmf.empty()) throw InvalidArgumentError("pmf must be nonempty");
  const int d = static_cast<int>(pmf.front().first.size());
  const Density unit = Density::uniform(0.0, 1.0);
  std::vector<VectorAtom> atoms;
  atoms.reserve(pmf.size());
  for (const auto& [label, p] : pmf) {
    atoms.push_back({label, p, VectorDensity::product(std::vector<Density>(d, unit))});
  }
  return MixedPairVectorDistribution(std::move(atoms));
}

MixedPairVectorDistribution as_vector(const MixedPairDistribution& dist) {
  std::vector<VectorAtom> atoms;
  atoms.reserve(dist.size());
  for (const Atom& atom : dist.atoms()) {
    atoms.push_back({{atom.label}, atom.mass, VectorDensity::product({atom.shape})});
  }
  return MixedPairVectorDistribution(std::move(atoms), dist.truncation_tail_mass());
}

}  // namespace mixent
