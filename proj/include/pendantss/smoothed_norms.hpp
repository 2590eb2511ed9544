#pragma once

// Smoothed lp quasi-norm / lq norm pair and the log-ratio sparsity penalty
// built from them. (p, q) = (1, 2) is the SOOT case.

#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <string>

#include "pendantss/errors.hpp"
#include "pendantss/signal.hpp"

namespace pendantss {

struct SpoqParams {
  double p = 1.0;
  double q = 2.0;
  double alpha = 7e-7;
  double beta = 1e-9;
  double eta = 1e-3;
  double lambda = 1e-2;
};

/// Returns std::nullopt when the parameters are admissible, otherwise a
/// description naming the failed clause.
inline std::optional<std::string> validate(const SpoqParams& prm) {
  auto fail = [](const char* clause, double v) {
    std::ostringstream os;
    os << clause << " (got " << v << ")";
    return std::optional<std::string>(os.str());
  };
  if (!(prm.p > 0.0 && prm.p < 2.0)) return fail("p must lie in (0, 2)", prm.p);
  if (!(prm.q >= 2.0) || !std::isfinite(prm.q)) return fail("q must be >= 2", prm.q);
  if (!(prm.alpha > 0.0)) return fail("alpha must be > 0", prm.alpha);
  if (!(prm.beta > 0.0)) return fail("beta must be > 0", prm.beta);
  if (!(prm.eta > 0.0)) return fail("eta must be > 0", prm.eta);
  if (!(prm.lambda > 0.0)) return fail("lambda must be > 0", prm.lambda);
  if (prm.q == 2.0) {
    const double lhs = prm.eta * prm.eta * std::pow(prm.alpha, prm.p - 2.0);
    const double rhs = std::pow(prm.beta, prm.p);
    if (!(lhs > rhs)) {
      std::ostringstream os;
      os << "q = 2 requires eta^2 * alpha^(p-2) > beta^p (" << lhs << " <= " << rhs << ")";
      return os.str();
    }
  }
  return std::nullopt;
}

inline void require_valid(const SpoqParams& prm) {
  if (auto err = validate(prm)) throw ConfigError("SpoqParams: " + *err);
}

namespace detail {

inline void require_lp_args(double p, double alpha) {
  // p = 2 is not an admissible penalty exponent but the smoothed norm is
  // still well defined there.
  if (!(p > 0.0 && p <= 2.0) || !(alpha > 0.0)) throw ConfigError("lp_alpha: need p in (0,2], alpha > 0");
}

inline void require_lq_args(double q, double eta) {
  if (!(q >= 2.0) || !(eta > 0.0)) throw ConfigError("lq_eta: need q >= 2, eta > 0");
}

// |x|^q with the zero case explicit.
inline double abs_pow(double x, double q) {
  const double a = std::abs(x);
  if (a == 0.0) return 0.0;
  if (q == 2.0) return a * a;
  return std::pow(a, q);
}

}  // namespace detail

/// sum_n ((s_n^2 + alpha^2)^(p/2) - alpha^p), i.e. lp_alpha(s)^p.
/// Evaluated as alpha^p * expm1(p/2 * log1p(s^2/alpha^2)) to avoid
/// cancellation when |s_n| << alpha.
inline double lp_alpha_pow(std::span<const double> s, double p, double alpha) {
  detail::require_lp_args(p, alpha);
  const double ap = std::pow(alpha, p);
  double acc = 0.0;
  for (double v : s) {
    const double r = v / alpha;
    acc += ap * std::expm1(0.5 * p * std::log1p(r * r));
  }
  return acc;
}

inline double lp_alpha(std::span<const double> s, double p, double alpha) {
  return std::pow(lp_alpha_pow(s, p, alpha), 1.0 / p);
}

/// eta^q + sum_n |s_n|^q, i.e. lq_eta(s)^q.
inline double lq_eta_pow(std::span<const double> s, double q, double eta) {
  detail::require_lq_args(q, eta);
  double acc = std::pow(eta, q);
  for (double v : s) acc += detail::abs_pow(v, q);
  return acc;
}

inline double lq_eta(std::span<const double> s, double q, double eta) {
  return std::pow(lq_eta_pow(s, q, eta), 1.0 / q);
}

/// log( (lp_alpha(s)^p + beta^p)^(1/p) / lq_eta(s) ).
inline double psi(std::span<const double> s, const SpoqParams& prm) {
  const double num = lp_alpha_pow(s, prm.p, prm.alpha) + std::pow(prm.beta, prm.p);
  const double den = lq_eta_pow(s, prm.q, prm.eta);
  return std::log(num) / prm.p - std::log(den) / prm.q;
}

/// Gradient of psi. Vanishes at s = 0.
inline Signal grad_psi(std::span<const double> s, const SpoqParams& prm) {
  const double num = lp_alpha_pow(s, prm.p, prm.alpha) + std::pow(prm.beta, prm.p);
  const double den = lq_eta_pow(s, prm.q, prm.eta);
  const double a2 = prm.alpha * prm.alpha;
  Signal g(s.size());
  for (std::size_t n = 0; n < s.size(); ++n) {
    const double v = s[n];
    const double lp_term = v * std::pow(v * v + a2, 0.5 * prm.p - 1.0) / num;
    const double sgn = (v > 0.0) - (v < 0.0);
    const double lq_term = sgn * detail::abs_pow(v, prm.q - 1.0) / den;
    g[n] = lp_term - lq_term;
  }
  return g;
}

}  // namespace pendantss
