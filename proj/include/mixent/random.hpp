#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mixent {

// Seeded random stream with hand-rolled variate transforms so that a given
// seed produces the same sequence on every platform. std::mt19937_64 has a
// pinned output sequence; the std::*_distribution adaptors do not, so we
// avoid them.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Derive an independent substream, e.g. one per trial or bootstrap
  // resample. SplitMix64 finalizer decorrelates (seed, index) pairs.
  static RandomStream derive(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return RandomStream(x ^ (x >> 31));
  }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Strictly positive uniform, safe to pass to log().
  double uniform_positive() {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return u;
  }

  double exponential(double rate) { return -std::log(uniform_positive()) / rate; }

  double normal(double mean, double stddev) {
    const double u1 = uniform_positive();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(6.283185307179586476925286766559 * u2);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Index into a cumulative-weight routine left to callers; raw engine access
  // for integer draws.
  std::uint64_t bits() { return engine_(); }

  std::size_t index(std::size_t n) {
    // Rejection-free enough for test-scale n; modulo bias is < n/2^64.
    return static_cast<std::size_t>(engine_() % n);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mixent
