#include "mixent/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mixent/errors.hpp"
#include "mixent/quadrature.hpp"

namespace mixent {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double gaussian_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

Eigen::ArrayXd trapezoid_cumulative(const Eigen::ArrayXd& knots,
                                    const Eigen::ArrayXd& values) {
  Eigen::ArrayXd cum(knots.size());
  cum[0] = 0.0;
  for (Eigen::Index i = 1; i < knots.size(); ++i) {
    cum[i] = cum[i - 1] +
             0.5 * (values[i] + values[i - 1]) * (knots[i] - knots[i - 1]);
  }
  return cum;
}

void check_grid(const Eigen::ArrayXd& knots, const Eigen::ArrayXd& values) {
  if (knots.size() < 2 || knots.size() != values.size()) {
    throw InvalidArgumentError("piecewise-linear grid needs >= 2 (y, value) knots");
  }
  for (Eigen::Index i = 1; i < knots.size(); ++i) {
    if (!(knots[i] > knots[i - 1])) {
      throw InvalidArgumentError("piecewise-linear knots must be strictly increasing");
    }
  }
  if ((values < 0.0).any()) {
    throw InvalidArgumentError("piecewise-linear values must be nonnegative");
  }
}

}  // namespace

bool Interval::finite() const {
  return std::isfinite(lo) && std::isfinite(hi);
}

Density Density::uniform(double a, double b) {
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidArgumentError("uniform(a,b) requires finite a < b");
  }
  return Density(Uniform{a, b});
}

Density Density::exponential(double rate, double origin) {
  if (!(rate > 0.0) || !std::isfinite(origin)) {
    throw InvalidArgumentError("exponential(rate) requires rate > 0");
  }
  return Density(Exponential{rate, origin});
}

Density Density::gaussian(double mean, double variance) {
  if (!(variance > 0.0) || !std::isfinite(mean)) {
    throw InvalidArgumentError("gaussian(mean,variance) requires variance > 0");
  }
  return Density(Gaussian{mean, variance, std::sqrt(variance)});
}

Density Density::piecewise_linear(Eigen::ArrayXd knots, Eigen::ArrayXd values) {
  check_grid(knots, values);
  Eigen::ArrayXd cum = trapezoid_cumulative(knots, values);
  const double total = cum[cum.size() - 1];
  if (std::abs(total - 1.0) > 1e-6) {
    throw InvalidArgumentError("piecewise-linear density does not integrate to 1");
  }
  return Density(PiecewiseLinear{std::move(knots), std::move(values), std::move(cum)});
}

Density Density::piecewise_linear_normalized(Eigen::ArrayXd knots,
                                             Eigen::ArrayXd values) {
  check_grid(knots, values);
  Eigen::ArrayXd cum = trapezoid_cumulative(knots, values);
  const double total = cum[cum.size() - 1];
  if (!(total > 0.0)) {
    throw InvalidArgumentError("piecewise-linear density is identically zero");
  }
  values /= total;
  cum /= total;
  return Density(PiecewiseLinear{std::move(knots), std::move(values), std::move(cum)});
}

Density Density::mixture(std::vector<std::pair<double, Density>> parts) {
  if (parts.empty()) throw InvalidArgumentError("mixture needs at least one part");
  double total = 0.0;
  for (const auto& [w, part] : parts) {
    if (!(w > 0.0)) throw InvalidArgumentError("mixture weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgumentError("mixture weights must sum to 1");
  }
  return Density(std::make_shared<const Mixture>(Mixture{std::move(parts)}));
}

Density Density::custom(std::function<double(double)> evaluator, Interval support,
                        std::vector<double> breakpoints,
                        std::function<double(RandomStream&)> sampler) {
  if (!evaluator) throw InvalidArgumentError("custom density needs an evaluator");
  if (!(support.hi > support.lo)) {
    throw InvalidArgumentError("custom density support must be nondegenerate");
  }
  return Density(std::make_shared<const Custom>(
      Custom{std::move(evaluator), support, std::move(breakpoints), std::move(sampler)}));
}

double Density::operator()(double y) const {
  return std::visit(
      [y](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return (y >= s.a && y <= s.b) ? 1.0 / (s.b - s.a) : 0.0;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return y >= s.origin ? s.rate * std::exp(-s.rate * (y - s.origin)) : 0.0;
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          const double z = (y - s.mean) / s.sd;
          return std::exp(-0.5 * z * z) / (s.sd * std::sqrt(2.0 * M_PI));
        } else if constexpr (std::is_same_v<T, PiecewiseLinear>) {
          const auto& k = s.knots;
          if (y < k[0] || y > k[k.size() - 1]) return 0.0;
          const double* begin = k.data();
          const double* end = k.data() + k.size();
          auto it = std::upper_bound(begin, end, y);
          Eigen::Index i = std::min<Eigen::Index>(it - begin, k.size() - 1);
          const double t = (y - k[i - 1]) / (k[i] - k[i - 1]);
          return s.values[i - 1] + t * (s.values[i] - s.values[i - 1]);
        } else if constexpr (std::is_same_v<T, std::shared_ptr<const Mixture>>) {
          double v = 0.0;
          for (const auto& [w, part] : s->parts) v += w * part(y);
          return v;
        } else {
          return s->support.contains(y) ? std::max(0.0, s->fn(y)) : 0.0;
        }
      },
      spec_);
}

Density::Family Density::family() const {
  switch (spec_.index()) {
    case 0: return Family::Uniform;
    case 1: return Family::Exponential;
    case 2: return Family::Gaussian;
    case 3: return Family::PiecewiseLinear;
    case 4: return Family::Mixture;
    default: return Family::Custom;
  }
}

std::string Density::family_name() const {
  switch (family()) {
    case Family::Uniform: return "uniform";
    case Family::Exponential: return "exponential";
    case Family::Gaussian: return "gaussian";
    case Family::PiecewiseLinear: return "piecewise-linear";
    case Family::Mixture: return "mixture";
    default: return "custom";
  }
}

Interval Density::support() const {
  return std::visit(
      [](const auto& s) -> Interval {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return {s.a, s.b};
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return {s.origin, kInf};
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return {-kInf, kInf};
        } else if constexpr (std::is_same_v<T, PiecewiseLinear>) {
          return {s.knots[0], s.knots[s.knots.size() - 1]};
        } else if constexpr (std::is_same_v<T, std::shared_ptr<const Mixture>>) {
          Interval hull = s->parts.front().second.support();
          for (const auto& [w, part] : s->parts) {
            const Interval si = part.support();
            hull.lo = std::min(hull.lo, si.lo);
            hull.hi = std::max(hull.hi, si.hi);
          }
          return hull;
        } else {
          return s->support;
        }
      },
      spec_);
}

bool Density::tabulated() const {
  if (family() == Family::PiecewiseLinear) return true;
  if (family() == Family::Mixture) {
    const auto& mix = std::get<std::shared_ptr<const Mixture>>(spec_);
    return std::any_of(mix->parts.begin(), mix->parts.end(),
                       [](const auto& p) { return p.second.tabulated(); });
  }
  return false;
}

Interval Density::integration_interval(double tail_mass) const {
  return std::visit(
      [&](const auto& s) -> Interval {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return {s.a, s.b};
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return {s.origin, s.origin - std::log(tail_mass) / s.rate};
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          // two-sided tail beyond r sd is < exp(-r^2/2); +1 margin
          const double r = std::sqrt(-2.0 * std::log(tail_mass)) + 1.0;
          return {s.mean - r * s.sd, s.mean + r * s.sd};
        } else if constexpr (std::is_same_v<T, PiecewiseLinear>) {
          return {s.knots[0], s.knots[s.knots.size() - 1]};
        } else if constexpr (std::is_same_v<T, std::shared_ptr<const Mixture>>) {
          Interval hull{kInf, -kInf};
          for (const auto& [w, part] : s->parts) {
            const Interval pi = part.integration_interval(tail_mass);
            hull.lo = std::min(hull.lo, pi.lo);
            hull.hi = std::max(hull.hi, pi.hi);
          }
          return hull;
        } else {
          // Custom supports must manage their own tails; clip to the
          // divergence-test truncation radius.
          return {std::max(s->support.lo, -1e8), std::min(s->support.hi, 1e8)};
        }
      },
      spec_);
}

std::vector<double> Density::breakpoints() const {
  return std::visit(
      [](const auto& s) -> std::vector<double> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return {s.a, s.b};
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return {s.origin};
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return {s.mean};
        } else if constexpr (std::is_same_v<T, PiecewiseLinear>) {
          return {s.knots.data(), s.knots.data() + s.knots.size()};
        } else if constexpr (std::is_same_v<T, std::shared_ptr<const Mixture>>) {
          std::vector<double> all;
          for (const auto& [w, part] : s->parts) {
            auto b = part.breakpoints();
            all.insert(all.end(), b.begin(), b.end());
          }
          std::sort(all.begin(), all.end());
          all.erase(std::unique(all.begin(), all.end()), all.end());
          return all;
        } else {
          std::vector<double> all = s->breaks;
          if (std::isfinite(s->support.lo)) all.push_back(s->support.lo);
          if (std::isfinite(s->support.hi)) all.push_back(s->support.hi);
          std::sort(all.begin(), all.end());
          all.erase(std::unique(all.begin(), all.end()), all.end());
          return all;
        }
      },
      spec_);
}

double Density::mass_between(double lo, double hi) const {
  if (!(hi > lo)) return 0.0;
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          const double a = std::max(lo, s.a), b = std::min(hi, s.b);
          return b > a ? (b - a) / (s.b - s.a) : 0.0;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          const double a = std::max(lo, s.origin);
          if (hi <= a) return 0.0;
          const double fa = std::exp(-s.rate * (a - s.origin));
          const double fb = std::isfinite(hi) ? std::exp(-s.rate * (hi - s.origin)) : 0.0;
          return fa - fb;
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          const double za = std::isfinite(lo) ? (lo - s.mean) / s.sd : -kInf;
          const double zb = std::isfinite(hi) ? (hi - s.mean) / s.sd : kInf;
          return gaussian_cdf(zb) - gaussian_cdf(za);
        } else if constexpr (std::is_same_v<T, PiecewiseLinear>) {
          const auto& k = s.knots;
          auto cdf = [&](double y) -> double {
            if (y <= k[0]) return 0.0;
            if (y >= k[k.size() - 1]) return s.cumulative[k.size() - 1];
            auto it = std::upper_bound(k.data(), k.data() + k.size(), y);
            Eigen::Index i = std::min<Eigen::Index>(it - k.data(), k.size() - 1);
            const double h = y - k[i - 1];
            const double slope = (s.values[i] - s.values[i - 1]) / (k[i] - k[i - 1]);
            return s.cumulative[i - 1] + s.values[i - 1] * h + 0.5 * slope * h * h;
          };
          return cdf(hi) - cdf(lo);
        } else if constexpr (std::is_same_v<T, std::shared_ptr<const Mixture>>) {
          double m = 0.0;
          for (const auto& [w, part] : s->parts) m += w * part.mass_between(lo, hi);
          return m;
        } else {
          const double a = std::max(lo, s->support.lo);
          const double b = std::min(hi, s->support.hi);
          if (!(b > a)) return 0.0;
          return quad::integrate([&](double y) { return std::max(0.0, s->fn(y)); },
                                 a, b, 1e-10, s->breaks).value;
        }
      },
      spec_);
}

double Density::sample(RandomStream& rng) const {
  return std::visit(
      [&rng, this](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return rng.uniform(s.a, s.b);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return s.origin + rng.exponential(s.rate);
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return rng.normal(s.mean, s.sd);
        } else if constexpr (std::is_same_v<T, PiecewiseLinear>) {
          const auto& cum = s.cumulative;
          const double target = rng.uniform() * cum[cum.size() - 1];
          auto it = std::upper_bound(cum.data(), cum.data() + cum.size(), target);
          Eigen::Index i = std::clamp<Eigen::Index>(it - cum.data(), 1, cum.size() - 1);
          const double local = target - cum[i - 1];
          const double v0 = s.values[i - 1];
          const double width = s.knots[i] - s.knots[i - 1];
          const double slope = (s.values[i] - v0) / width;
          if (std::abs(slope) < 1e-14 * std::max(v0, 1.0)) {
            return s.knots[i - 1] + (v0 > 0.0 ? local / v0 : 0.5 * width);
          }
          const double disc = std::max(0.0, v0 * v0 + 2.0 * slope * local);
          return s.knots[i - 1] + (std::sqrt(disc) - v0) / slope;
        } else if constexpr (std::is_same_v<T, std::shared_ptr<const Mixture>>) {
          double u = rng.uniform();
          for (const auto& [w, part] : s->parts) {
            if (u < w) return part.sample(rng);
            u -= w;
          }
          return s->parts.back().second.sample(rng);
        } else {
          if (!s->sampler) {
            throw InvalidArgumentError("custom density has no sampler");
          }
          return s->sampler(rng);
        }
      },
      spec_);
}

std::optional<Density> Density::affine_image(double slope, double intercept) const {
  if (slope == 0.0) return std::nullopt;
  switch (family()) {
    case Family::Uniform: {
      const auto& s = std::get<Uniform>(spec_);
      const double u = slope * s.a + intercept;
      const double v = slope * s.b + intercept;
      return uniform(std::min(u, v), std::max(u, v));
    }
    case Family::Gaussian: {
      const auto& s = std::get<Gaussian>(spec_);
      return gaussian(slope * s.mean + intercept, slope * slope * s.variance);
    }
    case Family::Exponential: {
      if (slope < 0.0) return std::nullopt;  // reflected exponential: tabulate
      const auto& s = std::get<Exponential>(spec_);
      return exponential(s.rate / slope, slope * s.origin + intercept);
    }
    case Family::PiecewiseLinear: {
      const auto& s = std::get<PiecewiseLinear>(spec_);
      Eigen::ArrayXd k = slope * s.knots + intercept;
      Eigen::ArrayXd v = s.values / std::abs(slope);
      if (slope < 0.0) {
        k.reverseInPlace();
        v.reverseInPlace();
      }
      return piecewise_linear_normalized(std::move(k), std::move(v));
    }
    case Family::Mixture: {
      const auto& mix = std::get<std::shared_ptr<const Mixture>>(spec_);
      std::vector<std::pair<double, Density>> parts;
      parts.reserve(mix->parts.size());
      for (const auto& [w, part] : mix->parts) {
        auto image = part.affine_image(slope, intercept);
        if (!image) return std::nullopt;
        parts.emplace_back(w, std::move(*image));
      }
      return mixture(std::move(parts));
    }
    default:
      return std::nullopt;
  }
}

Density Density::tabulate(const std::function<double(double)>& evaluator,
                          Interval window, int knots) {
  if (knots < 2) throw InvalidArgumentError("tabulate needs >= 2 knots");
  Eigen::ArrayXd k = Eigen::ArrayXd::LinSpaced(knots, window.lo, window.hi);
  Eigen::ArrayXd v(knots);
  for (int i = 0; i < knots; ++i) v[i] = std::max(0.0, evaluator(k[i]));
  return piecewise_linear_normalized(std::move(k), std::move(v));
}

Density::UniformParams Density::uniform_params() const {
  const auto& s = std::get<Uniform>(spec_);
  return {s.a, s.b};
}

Density::ExponentialParams Density::exponential_params() const {
  const auto& s = std::get<Exponential>(spec_);
  return {s.rate, s.origin};
}

Density::GaussianParams Density::gaussian_params() const {
  const auto& s = std::get<Gaussian>(spec_);
  return {s.mean, s.variance};
}

const Eigen::ArrayXd& Density::knots() const {
  return std::get<PiecewiseLinear>(spec_).knots;
}

const Eigen::ArrayXd& Density::values() const {
  return std::get<PiecewiseLinear>(spec_).values;
}

}  // namespace mixent
