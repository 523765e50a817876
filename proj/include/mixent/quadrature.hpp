#pragma once

#include <functional>
#include <span>
#include <vector>

namespace mixent::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;  // accumulated local error estimates, always >= 0
  std::size_t evaluations = 0;

  Result& operator+=(const Result& other) {
    value += other.value;
    error += other.error;
    evaluations += other.evaluations;
    return *this;
  }
};

using Fn = std::function<double(double)>;

// Adaptive integration of f over the finite interval [a, b]: the interval is
// first split at the supplied breakpoints (kinks, support edges), then each
// segment is bisected recursively with a fixed 15-point Gauss-Legendre panel
// until the panel-vs-halves discrepancy drops below the local tolerance.
Result integrate(const Fn& f, double a, double b, double abs_tol,
                 std::span<const double> breakpoints = {});

// Integrate f over [a, +inf) by doubling blocks. Declares divergence when the
// latest block still contributes more than `tail_fraction` of the accumulated
// value at the maximum truncation radius. Throws DivergentIntegralError.
Result integrate_to_infinity(const Fn& f, double a, double abs_tol,
                             double tail_fraction = 1e-6,
                             double max_radius = 1e8);

// Nodes/weights of the panel rule on [-1, 1], exposed for fixed-order tensor
// rules (grid-cell integration).
std::span<const double> panel_nodes();
std::span<const double> panel_weights();

}  // namespace mixent::quad
