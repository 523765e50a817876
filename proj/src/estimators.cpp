#include "mixent/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mixent/errors.hpp"
#include "mixent/random.hpp"

namespace mixent {
namespace {

// Separate runs of equal values without disturbing the sort order: each
// duplicate moves up by multiples of a step no larger than 1e-12 of the
// sample range and no larger than its share of the gap to the next distinct
// value. Returns whether anything moved.
bool jitter_ties_sorted(std::vector<double>& xs, double range) {
  const double base = 1e-12 * range;
  bool jittered = false;
  std::size_t i = 0;
  while (i < xs.size()) {
    std::size_t j = i + 1;
    while (j < xs.size() && xs[j] == xs[i]) ++j;
    if (j - i > 1) {
      jittered = true;
      const double gap = j < xs.size() ? xs[j] - xs[i] : base * (j - i + 1);
      const double step = std::min(base, gap / static_cast<double>(j - i + 1));
      for (std::size_t t = i + 1; t < j; ++t) {
        xs[t] = xs[i] + step * static_cast<double>(t - i);
      }
    }
    i = j;
  }
  return jittered;
}

// Per-point terms log(2 r_ik) over a sorted, strictly increasing sample; the
// estimator is their mean plus the digamma bias constant.
std::vector<double> knn_log_distances(const std::vector<double>& xs, int k) {
  const std::size_t n = xs.size();
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    // k-th smallest |x_j - x_i| among neighbors; in sorted order the
    // candidates sit in the adjacent window.
    std::size_t left = i, right = i;
    double r = 0.0;
    for (int taken = 0; taken < k; ++taken) {
      const double dl = left > 0 ? xs[i] - xs[left - 1] : std::numeric_limits<double>::infinity();
      const double dr = right + 1 < n ? xs[right + 1] - xs[i] : std::numeric_limits<double>::infinity();
      if (dl <= dr) {
        --left;
        r = dl;
      } else {
        ++right;
        r = dr;
      }
    }
    terms[i] = std::log(2.0 * r);
  }
  return terms;
}

}  // namespace

double digamma(double x) {
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Asymptotic series: log x - 1/(2x) - 1/(12x^2) + 1/(120x^4) - ...;
  // with the recurrence shift to x >= 10 the truncation sits below 1e-13.
  return result + std::log(x) - 0.5 * inv -
         inv2 * (1.0 / 12.0 -
                 inv2 * (1.0 / 120.0 -
                         inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
}

EstimatorResult plugin_discrete_entropy(const std::vector<Label>& samples) {
  if (samples.empty()) throw InvalidArgumentError("need at least one sample");
  std::map<std::string, std::size_t> counts;
  for (const Label& s : samples) ++counts[to_string(s)];
  const double n = static_cast<double>(samples.size());
  double h = 0.0, second = 0.0;
  for (const auto& [label, c] : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
    second += p * std::log(p) * std::log(p);
  }
  EstimatorResult result;
  result.value = h;
  result.n = samples.size();
  result.standard_error = std::sqrt(std::max(0.0, second - h * h) / n);
  result.method = EstimatorResult::Method::PlugIn;
  return result;
}

EstimatorResult nn_differential_entropy(const std::vector<double>& samples,
                                        const NnOptions& options) {
  const std::size_t n = samples.size();
  const int k = options.k;
  if (k < 1 || n < static_cast<std::size_t>(k) + 1) {
    throw InvalidArgumentError("nearest-neighbor estimator needs n >= k+1 >= 2");
  }
  std::vector<double> xs = samples;
  std::sort(xs.begin(), xs.end());
  const double range = xs.back() - xs.front();
  if (!(range > 0.0)) {
    throw DegenerateSampleError("all samples equal; differential entropy undefined");
  }
  const bool jittered = jitter_ties_sorted(xs, range);

  const double bias = digamma(static_cast<double>(n)) - digamma(static_cast<double>(k));
  const std::vector<double> terms = knn_log_distances(xs, k);
  double term_sum = 0.0, term_sq = 0.0;
  for (double t : terms) {
    term_sum += t;
    term_sq += t * t;
  }
  const double dn = static_cast<double>(n);
  const double term_mean = term_sum / dn;

  EstimatorResult result;
  result.value = bias + term_mean;
  result.n = n;
  result.method = EstimatorResult::Method::NearestNeighbor;
  result.ties_jittered = jittered;

  if (options.bootstrap == 0) {
    const double var = std::max(0.0, term_sq / dn - term_mean * term_mean);
    result.standard_error = std::sqrt(var / dn);
    return result;
  }
  // Bootstrap over the per-point terms rather than over re-run nearest
  // neighbor searches: resampling raw values ties ~37% of each replicate,
  // and the tie jitter then floods the replicate with log(1e-12)-sized
  // distances. The estimator is the term mean up to a constant, so the
  // resampled-mean spread is the quantity of interest.
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t b = 0; b < options.bootstrap; ++b) {
    RandomStream rng = RandomStream::derive(options.seed, b + 1);
    double resample_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) resample_sum += terms[rng.index(n)];
    const double value = resample_sum / dn;
    sum += value;
    sum_sq += value * value;
  }
  const double bn = static_cast<double>(options.bootstrap);
  const double var = std::max(0.0, sum_sq / bn - (sum / bn) * (sum / bn));
  result.standard_error = std::sqrt(var);
  return result;
}

}  // namespace mixent
