#include "mixent/transform.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mixent/entropy.hpp"
#include "mixent/errors.hpp"

namespace mixent {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Clip an interval (possibly infinite) to a finite probe window.
Interval probe_window(Interval region, std::optional<Interval> clip) {
  Interval w = region;
  if (clip) {
    w.lo = std::max(w.lo, clip->lo);
    w.hi = std::min(w.hi, clip->hi);
  }
  if (!std::isfinite(w.lo)) w.lo = std::isfinite(w.hi) ? w.hi - 2e3 : -1e3;
  if (!std::isfinite(w.hi)) w.hi = w.lo + 2e3;
  return w;
}

Interval image_interval(const MapRegion& region) {
  const double u = region.map(std::isfinite(region.interval.lo)
                                  ? region.interval.lo
                                  : -kInf);
  const double v = region.map(std::isfinite(region.interval.hi)
                                  ? region.interval.hi
                                  : kInf);
  return {std::min(u, v), std::max(u, v)};
}

}  // namespace

RegionMap1d RegionMap1d::affine(double slope, double intercept) {
  RegionMap1d m;
  m.type = Type::Affine;
  m.slope = slope;
  m.intercept = intercept;
  return m;
}

RegionMap1d RegionMap1d::tabulated(Eigen::ArrayXd x, Eigen::ArrayXd fx) {
  if (x.size() < 2 || x.size() != fx.size()) {
    throw InvalidArgumentError("tabulated map needs >= 2 (x, F(x)) knots");
  }
  for (Eigen::Index i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) {
      throw InvalidArgumentError("tabulated map knots must be strictly increasing");
    }
  }
  RegionMap1d m;
  m.type = Type::Tabulated;
  m.x = std::move(x);
  m.fx = std::move(fx);
  return m;
}

double RegionMap1d::operator()(double y) const {
  if (type == Type::Affine) {
    if (!std::isfinite(y)) {
      return slope >= 0.0 ? y : -y;  // sign of infinity under the map
    }
    return slope * y + intercept;
  }
  const Eigen::Index n = x.size();
  auto it = std::upper_bound(x.data(), x.data() + n, y);
  const Eigen::Index i = std::clamp<Eigen::Index>(it - x.data(), 1, n - 1);
  const double t = (y - x[i - 1]) / (x[i] - x[i - 1]);
  return fx[i - 1] + t * (fx[i] - fx[i - 1]);
}

double RegionMap1d::derivative(double y) const {
  if (type == Type::Affine) return slope;
  const Eigen::Index n = x.size();
  auto it = std::upper_bound(x.data(), x.data() + n, y);
  const Eigen::Index i = std::clamp<Eigen::Index>(it - x.data(), 1, n - 1);
  return (fx[i] - fx[i - 1]) / (x[i] - x[i - 1]);
}

bool RegionMap1d::invertible() const {
  if (type == Type::Affine) return slope != 0.0;
  const double sign = fx[1] > fx[0] ? 1.0 : -1.0;
  for (Eigen::Index i = 1; i < fx.size(); ++i) {
    if (!(sign * (fx[i] - fx[i - 1]) > 0.0)) return false;
  }
  return true;
}

RegionMap1d RegionMap1d::inverted() const {
  if (!invertible()) {
    throw NonInvertibleError("region map has a zero-derivative or non-monotone piece");
  }
  if (type == Type::Affine) {
    return affine(1.0 / slope, -intercept / slope);
  }
  Eigen::ArrayXd ix = fx;
  Eigen::ArrayXd ifx = x;
  if (fx[1] < fx[0]) {
    ix.reverseInPlace();
    ifx.reverseInPlace();
  }
  return tabulated(std::move(ix), std::move(ifx));
}

MixedPairMap::MixedPairMap(std::vector<MapRegion> regions)
    : regions_(std::move(regions)) {
  if (regions_.empty()) throw InvalidArgumentError("map needs at least one region");
  for (const MapRegion& r : regions_) {
    if (!(r.interval.hi > r.interval.lo)) {
      throw InvalidArgumentError("map region intervals must be nondegenerate");
    }
    if (r.map.type == RegionMap1d::Type::Tabulated &&
        (r.interval.lo < r.map.x[0] - 1e-12 ||
         r.interval.hi > r.map.x[r.map.x.size() - 1] + 1e-12)) {
      throw InvalidArgumentError("tabulated map knots must cover the region");
    }
  }
  std::stable_sort(regions_.begin(), regions_.end(),
                   [](const MapRegion& a, const MapRegion& b) {
                     const std::string ka = to_string(a.input_label);
                     const std::string kb = to_string(b.input_label);
                     return ka != kb ? ka < kb : a.interval.lo < b.interval.lo;
                   });
}

const MapRegion* MixedPairMap::find_region(const Label& label, double y) const {
  // Regions are sorted by lower end, so the first hit is the leftmost one;
  // shared boundaries resolve to the lower region.
  for (const MapRegion& r : regions_) {
    if (r.input_label == label && r.interval.contains(y)) return &r;
  }
  return nullptr;
}

std::pair<Label, double> MixedPairMap::apply(const Label& label, double y) const {
  const MapRegion* r = find_region(label, y);
  if (r == nullptr) {
    throw InvalidArgumentError("point (" + to_string(label) + ", " +
                               std::to_string(y) + ") outside the map domain");
  }
  return {r->output_label, r->map(y)};
}

MixedPairMap MixedPairMap::inverse() const {
  std::vector<MapRegion> inv;
  inv.reserve(regions_.size());
  for (const MapRegion& r : regions_) {
    inv.push_back({r.output_label, image_interval(r), r.input_label,
                   r.map.inverted()});
  }
  return MixedPairMap(std::move(inv));
}

MixedPairMap MixedPairMap::compose(const MixedPairMap& f, const MixedPairMap& g) {
  std::vector<MapRegion> composed;
  for (const MapRegion& rf : f.regions()) {
    if (rf.map.type != RegionMap1d::Type::Affine) {
      throw InvalidArgumentError("compose supports affine regions only");
    }
    const Interval image = image_interval(rf);
    double covered = 0.0;
    for (const MapRegion& rg : g.regions()) {
      if (rg.map.type != RegionMap1d::Type::Affine) {
        throw InvalidArgumentError("compose supports affine regions only");
      }
      if (!(rg.input_label == rf.output_label)) continue;
      const Interval overlap{std::max(image.lo, rg.interval.lo),
                             std::min(image.hi, rg.interval.hi)};
      if (!(overlap.hi > overlap.lo)) continue;
      covered += overlap.width();
      const RegionMap1d finv = rf.map.inverted();
      const double p = finv(overlap.lo);
      const double q = finv(overlap.hi);
      composed.push_back(
          {rf.input_label,
           {std::min(p, q), std::max(p, q)},
           rg.output_label,
           RegionMap1d::affine(rg.map.slope * rf.map.slope,
                               rg.map.slope * rf.map.intercept + rg.map.intercept)});
    }
    if (image.finite() && std::abs(covered - image.width()) > 1e-9 * (1.0 + image.width())) {
      throw InvalidArgumentError("composition leaves part of the image uncovered");
    }
  }
  return MixedPairMap(std::move(composed));
}

BijectivityReport check_bijective(const MixedPairMap& map,
                                  std::size_t probes_per_region,
                                  std::optional<Interval> clip) {
  BijectivityReport report;
  report.probe_points = probes_per_region * map.regions().size();

  for (const MapRegion& r : map.regions()) {
    if (!r.map.invertible()) {
      report.reason = "region of label " + to_string(r.input_label) +
                      " has a non-invertible continuous part";
      return report;
    }
  }

  // Disjoint input regions per label and disjoint images per output label
  // (shared endpoints are fine: boundaries belong to the lower region).
  auto check_disjoint = [&](bool output_side) -> bool {
    std::map<std::string, std::vector<Interval>> by_label;
    for (const MapRegion& r : map.regions()) {
      by_label[to_string(output_side ? r.output_label : r.input_label)]
          .push_back(output_side ? image_interval(r) : r.interval);
    }
    for (auto& [label, intervals] : by_label) {
      std::sort(intervals.begin(), intervals.end(),
                [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
      for (std::size_t i = 1; i < intervals.size(); ++i) {
        const double scale =
            std::max({1.0, std::abs(intervals[i].lo), std::abs(intervals[i - 1].hi)});
        if (intervals[i].lo < intervals[i - 1].hi - 1e-12 * scale) {
          report.reason = std::string(output_side ? "images" : "regions") +
                          " overlap for label " + label;
          return false;
        }
      }
    }
    return true;
  };
  if (!check_disjoint(false) || !check_disjoint(true)) return report;

  MixedPairMap inv = map.inverse();
  for (const MapRegion& r : map.regions()) {
    const Interval window = probe_window(r.interval, clip);
    if (!(window.hi > window.lo)) continue;
    for (std::size_t k = 0; k < probes_per_region; ++k) {
      const double t = (k + 0.5) / probes_per_region;
      const double y = window.lo + t * window.width();
      const auto [label2, y2] = map.apply(r.input_label, y);
      const MapRegion* back = inv.find_region(label2, y2);
      if (back == nullptr || !(back->output_label == r.input_label)) {
        report.reason = "round trip changed the discrete label";
        return report;
      }
      const double y_back = back->map(y2);
      const double err = std::abs(y_back - y);
      report.worst_roundtrip = std::max(report.worst_roundtrip, err);
      if (err > 1e-9 * std::max(1.0, std::abs(y))) {
        report.reason = "round trip failed at (" + to_string(r.input_label) +
                        ", " + std::to_string(y) + ")";
        return report;
      }
    }
  }
  report.bijective = true;
  return report;
}

DerivativeCertification unit_derivative_check(const MixedPairMap& map,
                                              std::size_t grid_points_per_region,
                                              std::optional<Interval> clip) {
  DerivativeCertification cert;
  cert.grid_points_per_region = grid_points_per_region;
  cert.worst_label = map.regions().front().input_label;
  for (const MapRegion& r : map.regions()) {
    const Interval window = probe_window(r.interval, clip);
    if (!(window.hi > window.lo)) continue;
    for (std::size_t k = 0; k < grid_points_per_region; ++k) {
      const double t = (k + 0.5) / grid_points_per_region;
      const double y = window.lo + t * window.width();
      const double deviation = std::abs(std::abs(r.map.derivative(y)) - 1.0);
      if (deviation > cert.worst_deviation) {
        cert.worst_deviation = deviation;
        cert.worst_label = r.input_label;
        cert.worst_y = y;
      }
    }
  }
  cert.certified = cert.worst_deviation <= cert.tolerance;
  return cert;
}

VectorAtomMap VectorAtomMap::linear(std::vector<Label> input_label,
                                    std::vector<Label> output_label,
                                    Eigen::MatrixXd A, Eigen::VectorXd b,
                                    std::vector<Interval> domain_box) {
  VectorAtomMap m;
  m.input_label = std::move(input_label);
  m.output_label = std::move(output_label);
  auto matrix = std::make_shared<Eigen::MatrixXd>(std::move(A));
  auto offset = std::make_shared<Eigen::VectorXd>(std::move(b));
  m.forward = [matrix, offset](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return (*matrix) * y + (*offset);
  };
  m.jacobian = [matrix](const Eigen::VectorXd&) { return *matrix; };
  m.domain_box = std::move(domain_box);
  return m;
}

VectorMixedPairMap::VectorMixedPairMap(std::vector<VectorAtomMap> atom_maps)
    : atom_maps_(std::move(atom_maps)) {
  if (atom_maps_.empty()) throw InvalidArgumentError("map needs at least one atom");
  for (const VectorAtomMap& m : atom_maps_) {
    if (!m.forward) throw InvalidArgumentError("atom map needs a forward function");
    if (m.domain_box.empty()) {
      throw InvalidArgumentError("atom map needs a finite probe box");
    }
    for (const Interval& axis : m.domain_box) {
      if (!axis.finite() || !(axis.hi > axis.lo)) {
        throw InvalidArgumentError("probe box axes must be finite and nondegenerate");
      }
    }
  }
}

Eigen::MatrixXd VectorMixedPairMap::jacobian_at(std::size_t atom_index,
                                                const Eigen::VectorXd& y) const {
  const VectorAtomMap& m = atom_maps_.at(atom_index);
  if (m.jacobian) return m.jacobian(y);
  const int d = static_cast<int>(m.domain_box.size());
  Eigen::MatrixXd J(d, d);
  for (int j = 0; j < d; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(y[j]));
    Eigen::VectorXd hi = y, lo = y;
    hi[j] += h;
    lo[j] -= h;
    J.col(j) = (m.forward(hi) - m.forward(lo)) / (2.0 * h);
  }
  return J;
}

JacobianCertification unit_jacobian_check(const VectorMixedPairMap& map,
                                          std::size_t grid_points_per_axis) {
  JacobianCertification cert;
  for (std::size_t a = 0; a < map.atom_maps().size(); ++a) {
    const VectorAtomMap& m = map.atom_maps()[a];
    const int d = static_cast<int>(m.domain_box.size());
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= grid_points_per_axis;
    cert.grid_points_per_atom = total;
    Eigen::VectorXd y(d);
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rest = flat;
      for (int i = 0; i < d; ++i) {
        const std::size_t idx = rest % grid_points_per_axis;
        rest /= grid_points_per_axis;
        const double t = (idx + 0.5) / grid_points_per_axis;
        y[i] = m.domain_box[i].lo + t * m.domain_box[i].width();
      }
      const double det = std::abs(map.jacobian_at(a, y).determinant());
      if (det < 1e-12) {
        ++cert.singular_points;
      }
      const double deviation = std::abs(det - 1.0);
      if (deviation > cert.worst_deviation) {
        cert.worst_deviation = deviation;
        cert.worst_atom = a;
        cert.worst_point = y;
      }
    }
  }
  cert.certified = cert.worst_deviation <= cert.tolerance && cert.singular_points == 0;
  return cert;
}

namespace {

// Normalized restriction of a density to an interval; exact for uniform and
// piecewise-linear shapes, identity when the cut covers the whole window,
// tabulation otherwise.
Density restrict_normalized(const Density& f, Interval cut) {
  const Interval window = f.integration_interval();
  const double lo = std::max(cut.lo, window.lo);
  const double hi = std::min(cut.hi, window.hi);
  if (!(hi > lo)) {
    throw InvalidArgumentError("restriction interval carries no mass");
  }
  if (lo <= window.lo && hi >= window.hi) return f;
  switch (f.family()) {
    case Density::Family::Uniform:
      return Density::uniform(lo, hi);
    case Density::Family::PiecewiseLinear: {
      const Eigen::ArrayXd& k = f.knots();
      std::vector<double> nk{lo};
      std::vector<double> nv{f(lo)};
      for (Eigen::Index i = 0; i < k.size(); ++i) {
        if (k[i] > lo && k[i] < hi) {
          nk.push_back(k[i]);
          nv.push_back(f.values()[i]);
        }
      }
      nk.push_back(hi);
      nv.push_back(f(hi));
      return Density::piecewise_linear_normalized(
          Eigen::Map<const Eigen::ArrayXd>(nk.data(), nk.size()),
          Eigen::Map<const Eigen::ArrayXd>(nv.data(), nv.size()));
    }
    default:
      return Density::tabulate([&f](double y) { return f(y); }, {lo, hi}, 4096);
  }
}

// Image of a restricted density under one region map.
Density push_piece(const Density& restricted, const RegionMap1d& map) {
  if (map.type == RegionMap1d::Type::Affine) {
    if (auto image = restricted.affine_image(map.slope, map.intercept)) {
      return *image;
    }
  }
  const RegionMap1d inv = map.inverted();
  const Interval window = restricted.integration_interval();
  const double u = map(window.lo);
  const double v = map(window.hi);
  const Interval image{std::min(u, v), std::max(u, v)};
  return Density::tabulate(
      [&](double y2) {
        return restricted(inv(y2)) * std::abs(inv.derivative(y2));
      },
      image, 4096);
}

}  // namespace

MixedPairDistribution pushforward(const MixedPairDistribution& dist,
                                  const MixedPairMap& map) {
  const BijectivityReport bij =
      check_bijective(map, 1000, dist.integration_interval());
  if (!bij.bijective) {
    throw NonInvertibleError("map is not bijective: " + bij.reason);
  }

  struct Piece {
    double mass;
    Density density;
  };
  std::vector<std::pair<Label, std::vector<Piece>>> output;
  auto bucket = [&output](const Label& label) -> std::vector<Piece>& {
    for (auto& [l, pieces] : output) {
      if (l == label) return pieces;
    }
    output.emplace_back(label, std::vector<Piece>{});
    return output.back().second;
  };

  for (const Atom& atom : dist.atoms()) {
    double covered = 0.0;
    for (const MapRegion& r : map.regions()) {
      if (!(r.input_label == atom.label)) continue;
      const double piece_mass =
          atom.mass * atom.shape.mass_between(r.interval.lo, r.interval.hi);
      if (piece_mass <= 0.0) continue;
      covered += piece_mass;
      Density restricted = restrict_normalized(atom.shape, r.interval);
      bucket(r.output_label).push_back({piece_mass, push_piece(restricted, r.map)});
    }
    if (std::abs(covered - atom.mass) > 1e-9) {
      throw NonInvertibleError("map regions do not cover the support of atom " +
                               to_string(atom.label));
    }
  }

  std::vector<Atom> atoms;
  atoms.reserve(output.size());
  for (auto& [label, pieces] : output) {
    double mass = 0.0;
    for (const Piece& p : pieces) mass += p.mass;
    if (pieces.size() == 1) {
      atoms.push_back({label, mass, std::move(pieces.front().density)});
      continue;
    }
    std::vector<std::pair<double, Density>> parts;
    parts.reserve(pieces.size());
    double rescale = 0.0;
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
      parts.emplace_back(pieces[i].mass / mass, pieces[i].density);
      rescale += pieces[i].mass / mass;
    }
    parts.emplace_back(1.0 - rescale, pieces.back().density);
    atoms.push_back({label, mass, Density::mixture(std::move(parts))});
  }
  return MixedPairDistribution(std::move(atoms), dist.truncation_tail_mass());
}

PreservationReport preservation_report(const MixedPairDistribution& dist,
                                       const MixedPairMap& map,
                                       std::size_t grid_points_per_region) {
  PreservationReport report;
  report.bijectivity = check_bijective(map, 1000, dist.integration_interval());
  if (!report.bijectivity.bijective) {
    throw NonInvertibleError("map is not bijective: " + report.bijectivity.reason);
  }
  report.derivative = unit_derivative_check(map, grid_points_per_region,
                                            dist.integration_interval());
  report.certified = report.derivative.certified;
  report.entropy_in = mixed_entropy(dist).value;
  const MixedPairDistribution pushed = pushforward(dist, map);
  report.entropy_out = mixed_entropy(pushed).value;
  report.difference = report.entropy_out - report.entropy_in;
  return report;
}

}  // namespace mixent
