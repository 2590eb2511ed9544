#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "pendantss/errors.hpp"
#include "pendantss/signal.hpp"

namespace pendantss {

/// Reported value for an exact reconstruction.
inline constexpr double kSnrCapDb = 300.0;

/// 20 log10(||ref|| / ||ref - est||), capped at 300 dB.
inline double snr(std::span<const double> reference, std::span<const double> estimate) {
  detail::require_dims(reference.size() == estimate.size(), "snr: length mismatch");
  double ref2 = 0.0;
  double err2 = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    ref2 += reference[i] * reference[i];
    const double e = reference[i] - estimate[i];
    err2 += e * e;
  }
  if (ref2 == 0.0) throw ConfigError("snr: reference is identically zero");
  if (err2 == 0.0) return kSnrCapDb;
  return std::min(kSnrCapDb, 10.0 * std::log10(ref2 / err2));
}

/// snr restricted to the given indices.
inline double tsnr(std::span<const double> reference, std::span<const double> estimate,
                   std::span<const std::size_t> support) {
  detail::require_dims(reference.size() == estimate.size(), "tsnr: length mismatch");
  if (support.empty()) throw ConfigError("tsnr: empty support");
  std::vector<double> r;
  std::vector<double> e;
  r.reserve(support.size());
  e.reserve(support.size());
  for (std::size_t i : support) {
    detail::require_dims(i < reference.size(), "tsnr: support index out of range");
    r.push_back(reference[i]);
    e.push_back(estimate[i]);
  }
  return snr(r, e);
}

/// Indices where the reference is nonzero.
inline std::vector<std::size_t> support_of(std::span<const double> s) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (std::abs(s[i]) > 0.0) idx.push_back(i);
  return idx;
}

struct AlignedSnr {
  double db = 0.0;
  std::ptrdiff_t best_shift = 0;
};

/// Best snr(reference, shift_kernel(estimate, d)) over |d| <= max_shift.
/// Ties go to the smallest |d|, then to the negative shift.
inline AlignedSnr kernel_snr_aligned(const Kernel& reference, const Kernel& estimate, std::size_t max_shift) {
  detail::require_dims(reference.size() == estimate.size(), "kernel_snr_aligned: length mismatch");
  detail::require_dims(max_shift < reference.size(), "kernel_snr_aligned: max_shift must be < L");
  AlignedSnr best{snr(reference.taps(), estimate.taps()), 0};
  for (std::size_t m = 1; m <= max_shift; ++m) {
    for (std::ptrdiff_t d : {-static_cast<std::ptrdiff_t>(m), static_cast<std::ptrdiff_t>(m)}) {
      double db = 0.0;
      try {
        db = snr(reference.taps(), shift_kernel(estimate, d).taps());
      } catch (const ConfigError&) {
        continue;  // shift moved all mass out of the support
      }
      if (db > best.db) best = {db, d};
    }
  }
  return best;
}

/// 2 * snr_s + snr_pi + snr_t.
inline double composite(double snr_s, double snr_pi, double snr_t) { return 2.0 * snr_s + snr_pi + snr_t; }

struct MetricsReport {
  double snr_s = 0.0;
  double tsnr_s = 0.0;
  double snr_t = 0.0;
  double snr_pi = 0.0;
  double composite = 0.0;

  static MetricsReport make(double snr_s, double tsnr_s, double snr_t, double snr_pi) {
    return {snr_s, tsnr_s, snr_t, snr_pi, pendantss::composite(snr_s, snr_pi, snr_t)};
  }
};

}  // namespace pendantss
