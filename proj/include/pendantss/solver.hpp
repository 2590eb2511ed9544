#pragma once

// Trust-region block-coordinate variable-metric forward-backward solver for
//   min_{s >= 0, pi in simplex}  1/2 ||H (y - pi * s)||^2 + lambda * psi(s)
// followed by trend recovery t = (Id - H)(y - pi * s) and integer recentering
// of the kernel.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pendantss/data_fidelity.hpp"
#include "pendantss/errors.hpp"
#include "pendantss/highpass.hpp"
#include "pendantss/mm_metric.hpp"
#include "pendantss/objective.hpp"
#include "pendantss/projections.hpp"
#include "pendantss/signal.hpp"
#include "pendantss/smoothed_norms.hpp"

namespace pendantss {

struct SolverConfig {
  /// Admissible step interval is [kStepMargin, 2 - kStepMargin].
  static constexpr double kStepMargin = 0.01;

  double gamma_s = 1.9;
  double gamma_pi = 1.9;
  double theta = 0.5;
  int max_tr_tests = 50;
  /// Stopping tolerance on ||s_k - s_{k+1}||; unset means 1e-6 * sqrt(N).
  std::optional<double> epsilon;
  int k_max = 3000;

  double epsilon_for(std::size_t n) const {
    return epsilon ? *epsilon : 1e-6 * std::sqrt(static_cast<double>(n));
  }
};

inline void require_valid(const SolverConfig& cfg) {
  auto in_steps = [](double g) {
    return g >= SolverConfig::kStepMargin && g <= 2.0 - SolverConfig::kStepMargin;
  };
  if (!in_steps(cfg.gamma_s)) throw ConfigError("SolverConfig: gamma_s outside [0.01, 1.99]");
  if (!in_steps(cfg.gamma_pi)) throw ConfigError("SolverConfig: gamma_pi outside [0.01, 1.99]");
  if (!(cfg.theta > 0.0 && cfg.theta < 1.0)) throw ConfigError("SolverConfig: theta must lie in (0, 1)");
  if (cfg.max_tr_tests < 1) throw ConfigError("SolverConfig: max_tr_tests must be >= 1");
  if (cfg.epsilon && !(*cfg.epsilon > 0.0)) throw ConfigError("SolverConfig: epsilon must be > 0");
  if (cfg.k_max < 1) throw ConfigError("SolverConfig: k_max must be >= 1");
}

enum class StopReason { tolerance, iteration_cap };

inline std::string_view to_string(StopReason r) {
  return r == StopReason::tolerance ? "tolerance" : "iteration_cap";
}

struct Decomposition {
  Signal s_hat;
  Kernel pi_hat = Kernel::delta(1);
  Signal t_hat;
  int iterations = 0;
  /// Omega(s_0, pi_0) followed by Omega(s_k, pi_k) after each iteration.
  std::vector<double> objective_trace;
  std::vector<int> tr_tests_per_iter;
  StopReason stop_reason = StopReason::iteration_cap;
  /// Integer shift d applied by the final recentering.
  std::ptrdiff_t recenter_shift = 0;
};

/// Trust-region radii in the q-th-power domain: r_1 = sum_n |s_{k,n}|^q,
/// r_i = theta * r_{i-1} for 2 <= i <= I-1, r_I = 0.
inline std::vector<LqRadius> tr_radii(std::span<const double> s_k, double q, double theta, int count) {
  if (count < 1) throw ConfigError("tr_radii: need at least one radius");
  std::vector<LqRadius> r(static_cast<std::size_t>(count));
  if (count == 1) return r;
  r[0] = LqRadius::of(s_k, q);
  for (int i = 1; i + 1 < count; ++i) r[i] = {theta * r[i - 1].power};
  r.back() = {0.0};
  return r;
}

struct SignalUpdate {
  Signal s_next;
  int tr_tests = 0;
};

/// One variable-metric forward-backward step on the signal block with the
/// trust-region loop over lq-ball-complement radii. The metric is diagonal and
/// the constraint separable, so the metric projection onto the orthant is the
/// componentwise clamp. Always accepts by the last (zero) radius.
template <HighPassFilter H>
SignalUpdate update_s(std::span<const double> s_k, const Kernel& pi_k, std::span<const double> y,
                      const H& h, const SpoqParams& prm, const SolverConfig& cfg, double lipschitz_s_value) {
  const Signal grad = grad_f_s(s_k, pi_k.taps(), y, h, prm);
  const std::vector<double> curvature = metric_penalty_curvature(s_k, prm);
  const auto radii = tr_radii(s_k, prm.q, cfg.theta, cfg.max_tr_tests);
  Signal cand(s_k.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double shift = lipschitz_s_value + prm.lambda * chi(prm.q, prm.eta, radii[i]);
    for (std::size_t n = 0; n < s_k.size(); ++n) {
      const double v = s_k[n] - cfg.gamma_s * grad[n] / (shift + curvature[n]);
      cand[n] = v > 0.0 ? v : 0.0;
    }
    if (in_ball_complement(cand, prm.q, radii[i])) return {std::move(cand), static_cast<int>(i + 1)};
  }
  // Unreachable: the last radius is 0 and every vector passes it.
  throw std::logic_error("update_s: trust-region loop exhausted");
}

template <HighPassFilter H>
SignalUpdate update_s(std::span<const double> s_k, const Kernel& pi_k, std::span<const double> y,
                      const H& h, const SpoqParams& prm, const SolverConfig& cfg) {
  return update_s(s_k, pi_k, y, h, prm, cfg, lipschitz_s(pi_k, h).value);
}

/// Projected gradient step on the kernel block with step gamma_pi / Lambda_2.
template <HighPassFilter H>
Kernel update_pi(const Kernel& pi_k, std::span<const double> s_next, std::span<const double> y, const H& h,
                 const SolverConfig& cfg, double lipschitz_pi_value) {
  const std::vector<double> g = grad_rho_pi(s_next, pi_k.taps(), y, h);
  std::vector<double> v(pi_k.size());
  const double step = cfg.gamma_pi / lipschitz_pi_value;
  for (std::size_t l = 0; l < v.size(); ++l) v[l] = pi_k[l] - step * g[l];
  return Kernel(project_simplex(v));
}

template <HighPassFilter H>
Kernel update_pi(const Kernel& pi_k, std::span<const double> s_next, std::span<const double> y, const H& h,
                 const SolverConfig& cfg) {
  return update_pi(pi_k, s_next, y, h, cfg, lipschitz_pi(s_next, h, pi_k.size()).value);
}

/// (Id - H)(y - pi * s).
template <HighPassFilter H>
Signal estimate_trend(std::span<const double> y, std::span<const double> s_hat, const Kernel& pi_hat,
                      const H& h) {
  detail::require_dims(y.size() == s_hat.size(), "estimate_trend: y and s lengths differ");
  Signal r = convolve_same(s_hat, pi_hat);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] - r[i];
  return apply_lowpass_complement(h, r);
}

struct Recentered {
  Signal s;
  Kernel pi;
  std::ptrdiff_t shift = 0;
};

/// Moves the kernel peak to the center tap and shifts the signal the other
/// way, so pi * s is unchanged away from the borders.
inline Recentered recenter(std::span<const double> s_hat, const Kernel& pi_hat) {
  const auto taps = pi_hat.taps();
  const auto peak = std::distance(taps.begin(), std::max_element(taps.begin(), taps.end()));
  const std::ptrdiff_t d = peak - static_cast<std::ptrdiff_t>(pi_hat.center());
  if (d == 0) return {Signal(s_hat.begin(), s_hat.end()), pi_hat, 0};
  return {shift_zero_fill(s_hat, d), shift_kernel(pi_hat, -d), d};
}

/// Normalized sampled Gaussian of standard deviation `sigma_samples` (in
/// samples) centered on tap L/2.
inline Kernel gaussian_taps_kernel(std::size_t length, double sigma_samples) {
  if (length % 2 == 0 || length == 0) throw DimensionError("gaussian kernel: length must be odd");
  if (!(sigma_samples > 0.0)) throw ConfigError("gaussian kernel: width must be > 0");
  const auto c = static_cast<double>(length / 2);
  std::vector<double> taps(length);
  double sum = 0.0;
  for (std::size_t l = 0; l < length; ++l) {
    const double u = (static_cast<double>(l) - c) / sigma_samples;
    taps[l] = std::exp(-0.5 * u * u);
    sum += taps[l];
  }
  for (double& v : taps) v /= sum;
  return Kernel(std::move(taps));
}

struct Initialization {
  Signal s0;
  Kernel pi0;
};

/// Constant positive signal (1.0) and a unit-width Gaussian kernel.
inline Initialization default_initialization(std::size_t n, std::size_t kernel_length) {
  return {Signal(n, 1.0), gaussian_taps_kernel(kernel_length, 1.0)};
}

template <HighPassFilter H>
Decomposition solve(std::span<const double> y, std::span<const double> init_s, const Kernel& init_pi,
                    const H& h, const SpoqParams& prm, const SolverConfig& cfg) {
  validate_signal(y, "y");
  detail::require_dims(init_s.size() == y.size(), "solve: init_s length differs from y");
  detail::require_dims(h.size() == y.size(), "solve: operator length differs from y");
  detail::require_dims(init_pi.size() <= y.size(), "solve: kernel longer than signal");
  require_valid(prm);
  require_valid(cfg);
  if (!is_nonneg(init_s)) throw ConfigError("solve: init_s must be nonnegative");

  const double eps = cfg.epsilon_for(y.size());
  Signal s(init_s.begin(), init_s.end());
  Kernel pi = init_pi;

  Decomposition out;
  out.objective_trace.push_back(objective(s, pi.taps(), y, h, prm));

  // Warm starts for the two power iterations; each block's constant is
  // recomputed whenever the other block changes.
  std::vector<double> warm_s;
  std::vector<double> warm_pi;
  out.stop_reason = StopReason::iteration_cap;
  for (int k = 0; k < cfg.k_max; ++k) {
    auto lip_s = lipschitz_s(pi, h, warm_s);
    warm_s = std::move(lip_s.eigenvector);
    SignalUpdate upd = update_s(s, pi, y, h, prm, cfg, lip_s.value);

    auto lip_pi = lipschitz_pi(upd.s_next, h, pi.size(), warm_pi);
    warm_pi = std::move(lip_pi.eigenvector);
    pi = update_pi(pi, upd.s_next, y, h, cfg, lip_pi.value);

    double step2 = 0.0;
    for (std::size_t n = 0; n < s.size(); ++n) {
      const double d = s[n] - upd.s_next[n];
      step2 += d * d;
    }
    s = std::move(upd.s_next);
    out.iterations = k + 1;
    out.tr_tests_per_iter.push_back(upd.tr_tests);
    out.objective_trace.push_back(objective(s, pi.taps(), y, h, prm));
    if (std::sqrt(step2) <= eps) {
      out.stop_reason = StopReason::tolerance;
      break;
    }
  }

  out.t_hat = estimate_trend(y, s, pi, h);
  Recentered rc = recenter(s, pi);
  out.s_hat = std::move(rc.s);
  out.pi_hat = std::move(rc.pi);
  out.recenter_shift = rc.shift;
  return out;
}

}  // namespace pendantss
