#pragma once

// Omega(s, pi) = f(s, pi) + g(s, pi) with f = rho + lambda * psi and g the
// indicator of (nonnegative orthant) x (unit simplex).

#include <cmath>
#include <limits>
#include <numeric>
#include <span>

#include "pendantss/data_fidelity.hpp"
#include "pendantss/smoothed_norms.hpp"

namespace pendantss {

inline constexpr double kFeasibilityTol = 1e-12;

inline bool is_nonneg(std::span<const double> s) {
  for (double v : s)
    if (v < 0.0) return false;
  return true;
}

inline bool is_on_simplex(std::span<const double> k, double tol = kFeasibilityTol) {
  double sum = 0.0;
  for (double v : k) {
    if (v < 0.0) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

template <HighPassFilter H>
double smooth_objective(std::span<const double> s, std::span<const double> k, std::span<const double> y,
                        const H& h, const SpoqParams& prm) {
  return rho(s, k, y, h) + prm.lambda * psi(s, prm);
}

/// Omega; +inf outside the feasible set.
template <HighPassFilter H>
double objective(std::span<const double> s, std::span<const double> k, std::span<const double> y,
                 const H& h, const SpoqParams& prm) {
  if (!is_nonneg(s) || !is_on_simplex(k)) return std::numeric_limits<double>::infinity();
  return smooth_objective(s, k, y, h, prm);
}

/// Gradient of f in the signal block: grad_rho_s + lambda * grad_psi.
template <HighPassFilter H>
Signal grad_f_s(std::span<const double> s, std::span<const double> k, std::span<const double> y,
                const H& h, const SpoqParams& prm) {
  Signal g = grad_rho_s(s, k, y, h);
  const Signal gp = grad_psi(s, prm);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += prm.lambda * gp[i];
  return g;
}

}  // namespace pendantss
