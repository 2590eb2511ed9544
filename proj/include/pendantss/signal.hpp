#pragma once

// Sample vectors, peak kernels and the centered zero-padded convolution that
// links them: y = s * pi + t + n.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pendantss/errors.hpp"

namespace pendantss {

/// Real sample vector. Used for observations, spike trains, trends and any
/// intermediate quantity living in R^N (gradients, residuals).
using Signal = std::vector<double>;

/// Throws DimensionError unless the signal is non-empty and finite.
inline void validate_signal(std::span<const double> s, const char* name = "signal") {
  if (s.empty()) throw DimensionError(std::string(name) + ": empty");
  for (double v : s)
    if (!std::isfinite(v)) throw DimensionError(std::string(name) + ": non-finite sample");
}

/// Nonnegative, unit-sum, odd-length peak shape. The tap at index size()/2 is
/// the kernel origin.
class Kernel {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit Kernel(std::vector<double> taps) : taps_(std::move(taps)) {
    if (taps_.empty() || taps_.size() % 2 == 0)
      throw DimensionError("Kernel: length must be odd and >= 1");
    double sum = 0.0;
    for (double v : taps_) {
      if (!std::isfinite(v) || v < 0.0) throw ConfigError("Kernel: taps must be finite and >= 0");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) throw ConfigError("Kernel: taps must sum to 1");
  }

  static Kernel delta(std::size_t length) {
    std::vector<double> taps(length, 0.0);
    if (length % 2 == 1) taps[length / 2] = 1.0;
    return Kernel(std::move(taps));
  }

  std::size_t size() const noexcept { return taps_.size(); }
  std::size_t center() const noexcept { return taps_.size() / 2; }
  double operator[](std::size_t i) const noexcept { return taps_[i]; }
  std::span<const double> taps() const noexcept { return taps_; }
  const std::vector<double>& vec() const noexcept { return taps_; }

  friend bool operator==(const Kernel&, const Kernel&) = default;

 private:
  std::vector<double> taps_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  detail::require_dims(a.size() == b.size(), "dot: length mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// out[n] = sum_l k[l] * s[n - l + c], c = floor(L/2), zero outside [0, N).
/// The kernel argument is any tap vector so the map stays linear in k.
inline Signal convolve_same(std::span<const double> s, std::span<const double> k) {
  const auto n = static_cast<std::ptrdiff_t>(s.size());
  const auto len = static_cast<std::ptrdiff_t>(k.size());
  detail::require_dims(len >= 1 && len <= n, "convolve_same: need 1 <= L <= N");
  const std::ptrdiff_t c = len / 2;
  Signal out(s.size(), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    // s index j = i - l + c must lie in [0, n)
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i + c - n + 1);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len - 1, i + c);
    double acc = 0.0;
    for (std::ptrdiff_t l = lo; l <= hi; ++l) acc += k[l] * s[i - l + c];
    out[i] = acc;
  }
  return out;
}

inline Signal convolve_same(std::span<const double> s, const Kernel& k) {
  return convolve_same(s, k.taps());
}

/// Adjoint of s -> convolve_same(s, k): out[m] = sum_l k[l] * r[m + l - c].
inline Signal adjoint_convolve_wrt_s(std::span<const double> r, std::span<const double> k) {
  const auto n = static_cast<std::ptrdiff_t>(r.size());
  const auto len = static_cast<std::ptrdiff_t>(k.size());
  detail::require_dims(len >= 1 && len <= n, "adjoint_convolve_wrt_s: need 1 <= L <= N");
  const std::ptrdiff_t c = len / 2;
  Signal out(r.size(), 0.0);
  for (std::ptrdiff_t m = 0; m < n; ++m) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, c - m);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len - 1, n - 1 - m + c);
    double acc = 0.0;
    for (std::ptrdiff_t l = lo; l <= hi; ++l) acc += k[l] * r[m + l - c];
    out[m] = acc;
  }
  return out;
}

inline Signal adjoint_convolve_wrt_s(std::span<const double> r, const Kernel& k) {
  return adjoint_convolve_wrt_s(r, k.taps());
}

/// Adjoint of k -> convolve_same(s, k) for kernels of length L:
/// out[l] = sum_n r[n] * s[n - l + c].
inline std::vector<double> adjoint_convolve_wrt_k(std::span<const double> r,
                                                  std::span<const double> s, std::size_t length) {
  detail::require_dims(r.size() == s.size(), "adjoint_convolve_wrt_k: r and s lengths differ");
  detail::require_dims(length >= 1 && length <= s.size(), "adjoint_convolve_wrt_k: need 1 <= L <= N");
  const auto n = static_cast<std::ptrdiff_t>(s.size());
  const auto len = static_cast<std::ptrdiff_t>(length);
  const std::ptrdiff_t c = len / 2;
  std::vector<double> out(length, 0.0);
  for (std::ptrdiff_t l = 0; l < len; ++l) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, l - c);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, n - 1 + l - c);
    double acc = 0.0;
    for (std::ptrdiff_t i = lo; i <= hi; ++i) acc += r[i] * s[i - l + c];
    out[l] = acc;
  }
  return out;
}

/// out[i] = v[i - d], zero-filled.
inline std::vector<double> shift_zero_fill(std::span<const double> v, std::ptrdiff_t d) {
  const auto n = static_cast<std::ptrdiff_t>(v.size());
  std::vector<double> out(v.size(), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t j = i - d;
    if (j >= 0 && j < n) out[i] = v[j];
  }
  return out;
}

/// Translates the taps by d (positive = towards higher indices) and
/// renormalizes to unit sum.
inline Kernel shift_kernel(const Kernel& k, std::ptrdiff_t d) {
  const auto len = static_cast<std::ptrdiff_t>(k.size());
  if (d <= -len || d >= len) throw DimensionError("shift_kernel: |d| must be < L");
  if (d == 0) return k;
  auto taps = shift_zero_fill(k.taps(), d);
  const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
  if (sum < 1e-14) throw ConfigError("shift_kernel: shift removes all kernel mass");
  for (double& v : taps) v /= sum;
  return Kernel(std::move(taps));
}

}  // namespace pendantss
