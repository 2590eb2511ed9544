#pragma once

// Filtered quadratic fidelity rho(s, pi) = 1/2 ||H (y - pi * s)||^2, its block
// gradients and block Lipschitz constants.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "pendantss/errors.hpp"
#include "pendantss/highpass.hpp"
#include "pendantss/power_iteration.hpp"
#include "pendantss/signal.hpp"

namespace pendantss {

inline constexpr double kLipschitzSafety = 1.01;
inline constexpr double kLipschitzFloor = 1e-12;
inline constexpr double kPowerIterationTol = 1e-6;
inline constexpr int kPowerIterationMaxIter = 500;

struct LipschitzEstimate {
  double value = 0.0;                ///< safety factor included
  std::vector<double> eigenvector;   ///< reusable as a warm start
  int iterations = 0;
  bool converged = true;  ///< false: budget exhausted, last Rayleigh quotient used
};

namespace detail {

template <HighPassFilter H>
void require_fidelity_dims(std::span<const double> s, std::span<const double> k,
                           std::span<const double> y, const H& h) {
  require_dims(s.size() == y.size(), "data fidelity: s and y lengths differ");
  require_dims(h.size() == y.size(), "data fidelity: operator length differs from y");
  require_dims(k.size() >= 1 && k.size() <= y.size(), "data fidelity: need 1 <= L <= N");
}

// Fixed pseudo-random start with entries in [0.5, 1.5]: positive, so it
// overlaps Perron-like dominant vectors, yet far from the constant vector,
// which is close to an eigenvector of several of our operators.
inline std::vector<double> power_seed(std::size_t n) {
  std::mt19937_64 gen(0x5EEDu);
  std::vector<double> x(n);
  for (double& v : x) v = 0.5 + static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return x;
}

// Power iteration that accepts an exhausted budget. Exhaustion means a
// cluster of nearly equal top eigenvalues: after 500 sweeps every component
// below 0.99 of the top eigenvalue has decayed by 0.99^1000, so the last
// Rayleigh quotient is within a fraction of a percent of lambda_max and the
// safety factor covers it. Non-finite or non-positive values still throw.
template <class Apply>
LipschitzEstimate top_eigenvalue(Apply&& op, std::vector<double> start) {
  try {
    auto res = power_iteration(op, std::move(start), kPowerIterationTol, kPowerIterationMaxIter);
    return {std::max(kLipschitzSafety * res.value, kLipschitzFloor), std::move(res.vector), res.iterations, true};
  } catch (const ConvergenceError& e) {
    if (!std::isfinite(e.last_value()) || !(e.last_value() > 0.0)) throw;
    return {kLipschitzSafety * e.last_value(), e.last_vector(), kPowerIterationMaxIter, false};
  }
}

inline std::vector<double> start_vector(std::span<const double> warm, std::size_t n) {
  if (warm.size() == n && norm2(warm) > 0.0) return {warm.begin(), warm.end()};
  return power_seed(n);
}

}  // namespace detail

/// H^T H (y - pi * s).
template <HighPassFilter H>
Signal filtered_residual(std::span<const double> s, std::span<const double> k,
                         std::span<const double> y, const H& h) {
  detail::require_fidelity_dims(s, k, y, h);
  Signal r = convolve_same(s, k);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] - r[i];
  return h.apply_gram(r);
}

template <HighPassFilter H>
double rho(std::span<const double> s, std::span<const double> k, std::span<const double> y, const H& h) {
  detail::require_fidelity_dims(s, k, y, h);
  Signal r = convolve_same(s, k);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] - r[i];
  const Signal hr = h.apply(r);
  return 0.5 * dot(hr, hr);
}

template <HighPassFilter H>
double rho(std::span<const double> s, const Kernel& k, std::span<const double> y, const H& h) {
  return rho(s, k.taps(), y, h);
}

/// -Pi^T H^T H (y - Pi s).
template <HighPassFilter H>
Signal grad_rho_s(std::span<const double> s, std::span<const double> k, std::span<const double> y,
                  const H& h) {
  Signal g = adjoint_convolve_wrt_s(filtered_residual(s, k, y, h), k);
  for (double& v : g) v = -v;
  return g;
}

template <HighPassFilter H>
Signal grad_rho_s(std::span<const double> s, const Kernel& k, std::span<const double> y, const H& h) {
  return grad_rho_s(s, k.taps(), y, h);
}

/// -S^T H^T H (y - S pi), S the convolution-by-s matrix acting on kernels.
template <HighPassFilter H>
std::vector<double> grad_rho_pi(std::span<const double> s, std::span<const double> k,
                                std::span<const double> y, const H& h) {
  std::vector<double> g = adjoint_convolve_wrt_k(filtered_residual(s, k, y, h), s, k.size());
  for (double& v : g) v = -v;
  return g;
}

template <HighPassFilter H>
std::vector<double> grad_rho_pi(std::span<const double> s, const Kernel& k, std::span<const double> y,
                                const H& h) {
  return grad_rho_pi(s, k.taps(), y, h);
}

/// Lipschitz constant of grad_rho_s: 1.01 * lambda_max((H Pi)^T (H Pi)).
template <HighPassFilter H>
LipschitzEstimate lipschitz_s(std::span<const double> k, const H& h,
                              std::span<const double> warm_start = {}) {
  const std::size_t n = h.size();
  detail::require_dims(k.size() >= 1 && k.size() <= n, "lipschitz_s: need 1 <= L <= N");
  auto op = [&](std::span<const double> x) {
    return adjoint_convolve_wrt_s(h.apply_gram(convolve_same(x, k)), k);
  };
  return detail::top_eigenvalue(op, detail::start_vector(warm_start, n));
}

template <HighPassFilter H>
LipschitzEstimate lipschitz_s(const Kernel& k, const H& h, std::span<const double> warm_start = {}) {
  return lipschitz_s(k.taps(), h, warm_start);
}

/// Lipschitz constant of grad_rho_pi for kernels of length L:
/// 1.01 * lambda_max((H S)^T (H S)); returns the 1e-12 floor for s = 0.
template <HighPassFilter H>
LipschitzEstimate lipschitz_pi(std::span<const double> s, const H& h, std::size_t length,
                               std::span<const double> warm_start = {}) {
  detail::require_dims(s.size() == h.size(), "lipschitz_pi: s length differs from operator");
  detail::require_dims(length >= 1 && length <= s.size(), "lipschitz_pi: need 1 <= L <= N");
  bool all_zero = true;
  for (double v : s) all_zero = all_zero && v == 0.0;
  if (all_zero) return {kLipschitzFloor, detail::power_seed(length), 0};
  auto op = [&](std::span<const double> x) {
    return adjoint_convolve_wrt_k(h.apply_gram(convolve_same(s, x)), s, length);
  };
  return detail::top_eigenvalue(op, detail::start_vector(warm_start, length));
}

}  // namespace pendantss
