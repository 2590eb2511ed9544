#pragma once

// Seeded generators for synthetic peak signals: y = s * pi + t + n.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "pendantss/errors.hpp"
#include "pendantss/metrics.hpp"
#include "pendantss/random.hpp"
#include "pendantss/signal.hpp"

namespace pendantss {

/// Gaussian peak shape. The L taps are mapped onto the abscissa [-1, 1]
/// (spacing 2 / (L - 1)), and sigma is expressed in that unit, so
/// sigma = 0.15 with L = 21 is 1.5 taps wide.
inline Kernel gen_gaussian_kernel(std::size_t length, double sigma) {
  if (length == 0 || length % 2 == 0) throw DimensionError("gen_gaussian_kernel: L must be odd");
  if (!(sigma > 0.0)) throw ConfigError("gen_gaussian_kernel: sigma must be > 0");
  if (length == 1) return Kernel({1.0});
  const double spacing = 2.0 / static_cast<double>(length - 1);
  const auto c = static_cast<std::ptrdiff_t>(length / 2);
  std::vector<double> taps(length);
  double sum = 0.0;
  for (std::size_t l = 0; l < length; ++l) {
    const double x = static_cast<double>(static_cast<std::ptrdiff_t>(l) - c) * spacing;
    taps[l] = std::exp(-x * x / (2.0 * sigma * sigma));
    sum += taps[l];
  }
  for (double& v : taps) v /= sum;
  // Exact mirror symmetry regardless of summation order.
  for (std::size_t j = 1; j <= length / 2; ++j) taps[length / 2 + j] = taps[length / 2 - j];
  return Kernel(std::move(taps));
}

struct SpikeTrain {
  Signal s;
  std::vector<std::size_t> support;
};

/// n_spikes positions drawn uniformly among the configurations with pairwise
/// distance >= min_gap; amplitudes uniform in [amp_low, amp_high].
inline SpikeTrain gen_spike_train(std::size_t n, std::size_t n_spikes, std::size_t min_gap, double amp_low,
                                  double amp_high, std::uint64_t seed) {
  if (n_spikes * (min_gap + 1) > n)
    throw ConfigError("gen_spike_train: cannot place " + std::to_string(n_spikes) +
                      " spikes with gap " + std::to_string(min_gap) + " in " + std::to_string(n) +
                      " samples");
  if (!(amp_low > 0.0) || amp_high < amp_low) throw ConfigError("gen_spike_train: need 0 < amp_low <= amp_high");
  SpikeTrain out{Signal(n, 0.0), {}};
  if (n_spikes == 0) return out;
  const std::size_t gap = std::max<std::size_t>(min_gap, 1);
  // Choose n_spikes distinct slots among n - (n_spikes - 1)(gap - 1) (Floyd),
  // then spread the sorted slots by (gap - 1) per rank.
  const std::size_t slots = n - (n_spikes - 1) * (gap - 1);
  Rng rng(seed);
  std::vector<std::size_t> chosen;
  chosen.reserve(n_spikes);
  for (std::size_t j = slots - n_spikes; j < slots; ++j) {
    const auto t = static_cast<std::size_t>(rng.uniform_index(j + 1));
    if (std::find(chosen.begin(), chosen.end(), t) == chosen.end())
      chosen.push_back(t);
    else
      chosen.push_back(j);
  }
  std::sort(chosen.begin(), chosen.end());
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    const std::size_t pos = chosen[i] + i * (gap - 1);
    out.support.push_back(pos);
  }
  for (std::size_t pos : out.support) out.s[pos] = rng.uniform(amp_low, amp_high);
  return out;
}

/// Slowly varying baseline: an offset plus two or three sinusoids on DFT
/// bins 1..max_bin with random phases, scaled so max |t| = amplitude.
inline Signal gen_trend(std::size_t n, double amplitude, std::size_t max_bin, std::uint64_t seed) {
  if (n == 0) throw DimensionError("gen_trend: empty signal");
  if (max_bin < 1 || max_bin >= n / 2) throw ConfigError("gen_trend: max_bin must lie in [1, N/2)");
  Signal t(n, 0.0);
  if (amplitude == 0.0) return t;
  Rng rng(seed);
  const double offset = rng.uniform(0.5, 1.0);
  const int count = 2 + static_cast<int>(rng.uniform_index(2));
  for (double& v : t) v = offset;
  const double nn = static_cast<double>(n);
  for (int c = 0; c < count; ++c) {
    const auto bin = 1 + rng.uniform_index(max_bin);
    const double amp = rng.uniform(0.2, 0.6);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < n; ++i) {
      const double arg = 2.0 * std::numbers::pi * static_cast<double>((bin * i) % n) / nn;
      t[i] += amp * std::cos(arg + phase);
    }
  }
  double peak = 0.0;
  for (double v : t) peak = std::max(peak, std::abs(v));
  for (double& v : t) v *= amplitude / peak;
  return t;
}

struct GroundTruth {
  Signal s_true;
  Kernel pi_true = Kernel::delta(1);
  Signal t_true;
  std::vector<std::size_t> support;
  double sigma = 0.0;
  Signal noise;
  Signal y;
  std::uint64_t seed = 0;
};

/// y = s * pi + t + n with white Gaussian n of standard deviation
/// (noise_percent / 100) * max(s * pi).
inline GroundTruth gen_observation(Signal s_true, Kernel pi_true, Signal t_true, double noise_percent,
                                   std::uint64_t seed) {
  detail::require_dims(s_true.size() == t_true.size(), "gen_observation: s and t lengths differ");
  if (!(noise_percent >= 0.0)) throw ConfigError("gen_observation: noise_percent must be >= 0");
  GroundTruth gt;
  const Signal x = convolve_same(s_true, pi_true);
  const double xmax = *std::max_element(x.begin(), x.end());
  gt.sigma = noise_percent / 100.0 * xmax;
  gt.noise.assign(x.size(), 0.0);
  gt.y.resize(x.size());
  Rng rng(seed);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (gt.sigma > 0.0) gt.noise[i] = gt.sigma * rng.normal();
    gt.y[i] = x[i] + t_true[i] + gt.noise[i];
  }
  gt.support = support_of(s_true);
  gt.s_true = std::move(s_true);
  gt.pi_true = std::move(pi_true);
  gt.t_true = std::move(t_true);
  gt.seed = seed;
  return gt;
}

}  // namespace pendantss
