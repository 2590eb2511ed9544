#pragma once

#include <algorithm>
#include <functional>
#include <span>
#include <vector>

namespace pendantss {

/// Componentwise max(v_n, 0): projection onto the nonnegative orthant.
inline std::vector<double> project_nonneg(std::span<const double> v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return x > 0.0 ? x : 0.0; });
  return out;
}

/// Euclidean projection onto the unit simplex {x >= 0, sum x = 1}.
/// Sort-based threshold: tau = (sum of the r largest entries - 1) / r for the
/// largest r keeping u_r > tau; entries at or below tau map to 0.
inline std::vector<double> project_simplex(std::span<const double> v) {
  std::vector<double> out(v.size(), 0.0);
  if (v.empty()) return out;
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] > t) tau = t;
  }
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] > tau ? v[i] - tau : 0.0;
  return out;
}

}  // namespace pendantss
