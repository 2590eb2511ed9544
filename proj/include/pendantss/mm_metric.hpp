#pragma once

// Diagonal majorize-minimize metric for the signal block and the lq-ball
// complement on which the associated quadratic majorant is valid.

#include <cmath>
#include <span>
#include <vector>

#include "pendantss/errors.hpp"
#include "pendantss/objective.hpp"
#include "pendantss/smoothed_norms.hpp"

namespace pendantss {

/// Radius of an lq ball, held as its q-th power (rho^q). Trust-region radii
/// are produced directly in this domain, so no q-th roots are taken.
struct LqRadius {
  double power = 0.0;

  static LqRadius from_norm(double radius, double q) { return {std::pow(radius, q)}; }
  /// Radius of the sphere through s: sum_n |s_n|^q.
  static LqRadius of(std::span<const double> s, double q) {
    double acc = 0.0;
    for (double v : s) acc += detail::abs_pow(v, q);
    return {acc};
  }
};

/// (q - 1) / (eta^q + rho^q)^(2/q).
inline double chi(double q, double eta, LqRadius radius) {
  if (!(q >= 2.0) || !(eta > 0.0) || !(radius.power >= 0.0))
    throw ConfigError("chi: need q >= 2, eta > 0, radius >= 0");
  return (q - 1.0) / std::pow(std::pow(eta, q) + radius.power, 2.0 / q);
}

inline double chi(double q, double eta, double rho_radius) {
  return chi(q, eta, LqRadius::from_norm(rho_radius, q));
}

/// sum_n |s_n|^q >= rho^q.
inline bool in_ball_complement(std::span<const double> s, double q, LqRadius radius) {
  return LqRadius::of(s, q).power >= radius.power;
}

/// Positive diagonal of the MM metric.
class MMMetricDiag {
 public:
  explicit MMMetricDiag(std::vector<double> diag) : diag_(std::move(diag)) {
    for (double v : diag_)
      if (!(v > 0.0)) throw ConfigError("MMMetricDiag: entries must be > 0");
  }
  std::size_t size() const noexcept { return diag_.size(); }
  double operator[](std::size_t i) const noexcept { return diag_[i]; }
  std::span<const double> values() const noexcept { return diag_; }

 private:
  std::vector<double> diag_;
};

/// Curvature contributed by the lp part of the penalty at s_k, without the
/// Lambda_1 + lambda*chi shift:
///   lambda / (lp_alpha(s_k)^p + beta^p) * (s_{k,n}^2 + alpha^2)^(p/2 - 1).
/// At p < 2 the last factor is bounded by alpha^(p-2) because alpha > 0.
inline std::vector<double> metric_penalty_curvature(std::span<const double> s_k, const SpoqParams& prm) {
  const double scale = prm.lambda / (lp_alpha_pow(s_k, prm.p, prm.alpha) + std::pow(prm.beta, prm.p));
  const double a2 = prm.alpha * prm.alpha;
  std::vector<double> out(s_k.size());
  for (std::size_t n = 0; n < s_k.size(); ++n)
    out[n] = scale * std::pow(s_k[n] * s_k[n] + a2, 0.5 * prm.p - 1.0);
  return out;
}

/// diag[n] = Lambda_1 + lambda * chi_{q,rho} + penalty curvature[n].
inline MMMetricDiag metric_diag(std::span<const double> s_k, double lipschitz_s_value, const SpoqParams& prm,
                                LqRadius radius) {
  require_valid(prm);
  if (!(lipschitz_s_value > 0.0)) throw ConfigError("metric_diag: Lambda_1 must be > 0");
  const double shift = lipschitz_s_value + prm.lambda * chi(prm.q, prm.eta, radius);
  std::vector<double> d = metric_penalty_curvature(s_k, prm);
  for (double& v : d) v += shift;
  return MMMetricDiag(std::move(d));
}

/// f(s_k, pi_k) + (s - s_k)^T grad_1 f(s_k, pi_k) + 1/2 ||s - s_k||_A^2.
template <HighPassFilter H>
double majorant_value(std::span<const double> s, std::span<const double> s_k, const Kernel& pi_k,
                      std::span<const double> y, const H& h, const SpoqParams& prm, const MMMetricDiag& a) {
  detail::require_dims(s.size() == s_k.size() && a.size() == s.size(), "majorant_value: length mismatch");
  const double f0 = smooth_objective(s_k, pi_k.taps(), y, h, prm);
  const Signal g = grad_f_s(s_k, pi_k.taps(), y, h, prm);
  double lin = 0.0;
  double quad = 0.0;
  for (std::size_t n = 0; n < s.size(); ++n) {
    const double d = s[n] - s_k[n];
    lin += d * g[n];
    quad += a[n] * d * d;
  }
  return f0 + lin + 0.5 * quad;
}

}  // namespace pendantss
