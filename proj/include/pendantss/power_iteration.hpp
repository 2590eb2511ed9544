#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "pendantss/errors.hpp"
#include "pendantss/signal.hpp"

namespace pendantss {

struct PowerIterationResult {
  double value = 0.0;
  std::vector<double> vector;
  int iterations = 0;
};

/// Largest eigenvalue of a symmetric positive semi-definite operator given as
/// a callable x -> A x. Stops when the Rayleigh quotient changes by at most
/// rtol (relative) between two iterations. Throws ConvergenceError carrying
/// the last iterate after max_iter sweeps.
template <class Apply>
PowerIterationResult power_iteration(Apply&& apply, std::vector<double> x, double rtol = 1e-6,
                                     int max_iter = 500) {
  double nx = norm2(x);
  if (nx == 0.0) throw DimensionError("power_iteration: zero starting vector");
  for (double& v : x) v /= nx;

  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<double> y = apply(std::span<const double>(x));
    const double value = dot(x, y);
    const double ny = norm2(y);
    if (ny == 0.0) return {0.0, std::move(x), it};
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = y[i] / ny;
    if (it > 1 && std::abs(value - prev) <= rtol * std::abs(value)) return {value, std::move(x), it};
    prev = value;
  }
  throw ConvergenceError("power_iteration: no convergence", prev, std::move(x));
}

}  // namespace pendantss
