#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "pendantss/errors.hpp"
#include "pendantss/signal.hpp"

namespace pendantss {

/// Linear high-pass operator used by the data-fidelity term. apply_gram is
/// H^T H; the trend estimate uses the low-pass complement Id - H.
template <class Op>
concept HighPassFilter = requires(const Op& h, std::span<const double> x) {
  { h.size() } -> std::convertible_to<std::size_t>;
  { h.apply(x) } -> std::same_as<Signal>;
  { h.apply_adjoint(x) } -> std::same_as<Signal>;
  { h.apply_gram(x) } -> std::same_as<Signal>;
};

/// Ideal zero-phase DFT-domain high-pass projector: every DFT bin k with
/// min(k, N - k) < cutoff_bin is removed, all others are kept.
///
/// The removed subspace is spanned by the real orthonormal vectors
///   1/sqrt(N),  sqrt(2/N) cos(2 pi k n / N),  sqrt(2/N) sin(2 pi k n / N),
/// for 1 <= k < cutoff_bin. Since cutoff_bin <= N/2 the Nyquist bin is never
/// part of it, so projecting onto that basis is exactly the DFT masking.
/// Cost per application is O(N * (2 * cutoff_bin - 1)).
class HighPassOperator {
 public:
  HighPassOperator(std::size_t length, std::size_t cutoff_bin) : n_(length), fc_(cutoff_bin) {
    if (length < 2) throw DimensionError("HighPassOperator: length must be >= 2");
    if (cutoff_bin < 1 || cutoff_bin > length / 2)
      throw ConfigError("HighPassOperator: cutoff_bin must lie in [1, N/2], got " +
                        std::to_string(cutoff_bin));
    auto basis = std::make_shared<std::vector<double>>();
    const std::size_t nb = 2 * cutoff_bin - 1;
    basis->reserve(nb * length);
    const double n = static_cast<double>(length);
    for (std::size_t i = 0; i < length; ++i) basis->push_back(1.0 / std::sqrt(n));
    const double amp = std::sqrt(2.0 / n);
    for (std::size_t k = 1; k < cutoff_bin; ++k) {
      for (int phase = 0; phase < 2; ++phase) {
        for (std::size_t i = 0; i < length; ++i) {
          // Reduce k*i mod N before scaling to keep the argument small.
          const double arg = 2.0 * std::numbers::pi * static_cast<double>((k * i) % length) / n;
          basis->push_back(amp * (phase == 0 ? std::cos(arg) : std::sin(arg)));
        }
      }
    }
    basis_ = std::move(basis);
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t cutoff_bin() const noexcept { return fc_; }

  Signal apply(std::span<const double> x) const {
    Signal out(x.begin(), x.end());
    subtract_lowpass(x, out);
    return out;
  }

  // Self-adjoint and idempotent: H^T = H, H^T H = H.
  Signal apply_adjoint(std::span<const double> x) const { return apply(x); }
  Signal apply_gram(std::span<const double> x) const { return apply(x); }

 private:
  void subtract_lowpass(std::span<const double> x, Signal& out) const {
    detail::require_dims(x.size() == n_, "HighPassOperator: length mismatch");
    const std::size_t nb = basis_->size() / n_;
    const double* b = basis_->data();
    for (std::size_t j = 0; j < nb; ++j, b += n_) {
      double c = 0.0;
      for (std::size_t i = 0; i < n_; ++i) c += b[i] * x[i];
      for (std::size_t i = 0; i < n_; ++i) out[i] -= c * b[i];
    }
  }

  std::size_t n_;
  std::size_t fc_;
  std::shared_ptr<const std::vector<double>> basis_;
};

static_assert(HighPassFilter<HighPassOperator>);

template <HighPassFilter H>
Signal apply_H(const H& h, std::span<const double> x) {
  return h.apply(x);
}

/// (Id - H) x.
template <HighPassFilter H>
Signal apply_lowpass_complement(const H& h, std::span<const double> x) {
  Signal hx = h.apply(x);
  for (std::size_t i = 0; i < hx.size(); ++i) hx[i] = x[i] - hx[i];
  return hx;
}

}  // namespace pendantss
