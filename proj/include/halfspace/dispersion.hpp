#pragma once

// Dispersion function of the half-space problem, its boundary values on the
// cut [-1, 1], its Laurent head at infinity, and the auxiliary Cauchy-type
// integrals T0, T and T2 = lambda + T.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>

#include "halfspace/error.hpp"
#include "halfspace/numerics.hpp"

namespace halfspace {

/// Distance from a logarithmic endpoint below which evaluation is refused.
inline constexpr double kEndpointGuard = 1e-8;

/// Dimensionless problem inputs plus the constants derived from them.
struct PlasmaParameters {
  double gamma = 0.0;    // omega / omega_p - 1
  double eps = 1.0;      // nu / omega_p
  double alpha_p = 1.0;  // normal momentum accommodation coefficient
  cplx e0{1.0, 0.0};     // field amplitude on the boundary

  cplx z0;       // 1 - i (1 + gamma) / eps
  cplx eta1_sq;  // eps^2 z0 / 3
  cplx c;        // eta1_sq * z0

  static PlasmaParameters make(double gamma, double eps, double alpha_p = 1.0, cplx e0 = {1.0, 0.0}) {
    if (!std::isfinite(eps) || !(eps > 0.0)) {
      throw Error(ErrorKind::validation, "eps must be finite and strictly positive", "eps");
    }
    if (!std::isfinite(gamma) || gamma < -1.0) {
      throw Error(ErrorKind::validation, "gamma must be finite and >= -1", "gamma");
    }
    if (!std::isfinite(alpha_p) || alpha_p < 0.0 || alpha_p > 1.0) {
      throw Error(ErrorKind::validation, "alpha_p must lie in [0, 1]", "alpha_p");
    }
    if (!std::isfinite(e0.real()) || !std::isfinite(e0.imag())) {
      throw Error(ErrorKind::validation, "e0 must be finite", "e0");
    }
    PlasmaParameters p;
    p.gamma = gamma;
    p.eps = eps;
    p.alpha_p = alpha_p;
    p.e0 = e0;
    p.z0 = cplx(1.0, -(1.0 + gamma) / eps);
    p.eta1_sq = cplx(eps * eps / 3.0, -eps * (1.0 + gamma) / 3.0);
    p.c = p.eta1_sq * p.z0;
    return p;
  }

  PlasmaParameters with_e0(cplx value) const { return make(gamma, eps, alpha_p, value); }
  PlasmaParameters with_alpha(double value) const { return make(gamma, eps, value, e0); }

  /// Square root of eta1^2 with positive real part.
  cplx eta1() const {
    cplx r = std::sqrt(eta1_sq);
    return r.real() < 0.0 ? -r : r;
  }
  /// lambda(eta1) = 1 - 1/z0.
  cplx lambda_1() const { return 1.0 - 1.0 / z0; }
  /// lambda at infinity.
  cplx lambda_inf() const { return 1.0 - 1.0 / z0 + 1.0 / (3.0 * z0 * eta1_sq); }
};

namespace detail {

inline bool on_cut(cplx z) { return z.imag() == 0.0 && std::abs(z.real()) < 1.0; }

inline void guard_endpoints(cplx z, const char* what) {
  if (std::abs(z - 1.0) < kEndpointGuard || std::abs(z + 1.0) < kEndpointGuard) {
    throw Error(ErrorKind::endpoint, std::string(what) + ": evaluation at a cut endpoint +-1");
  }
}

// Series of lambda_c about infinity: -sum_{k>=1} w^{2k} / (2k + 1), w = 1/z.
inline cplx case_lambda_series(cplx z) {
  const cplx w2 = 1.0 / (z * z);
  cplx term = w2;
  cplx sum = 0.0;
  for (int k = 1; k < 80; ++k) {
    const cplx add = term / (2.0 * k + 1.0);
    sum -= add;
    if (std::abs(add) <= 1e-18 * std::abs(sum)) break;
    term *= w2;
  }
  return sum;
}

inline cplx case_lambda_series_prime(cplx z) {
  const cplx w = 1.0 / z;
  const cplx w2 = w * w;
  cplx term = w2 * w;  // w^{2k+1}
  cplx sum = 0.0;
  for (int k = 1; k < 80; ++k) {
    const cplx add = term * (2.0 * k / (2.0 * k + 1.0));
    sum += add;
    if (std::abs(add) <= 1e-18 * std::abs(sum)) break;
    term *= w2;
  }
  return sum;
}

inline constexpr double kSeriesRadius = 2.0;

// int_0^1 (eta^2 - eta1^2) / (eta - z) d eta, principal log with cut on [0, 1].
inline cplx t0_integral(cplx z, cplx eta1_sq) {
  if (std::abs(z) > 4.0) {
    // -sum_n z^{-n-1} [1/(n+3) - eta1^2/(n+1)]
    const cplx w = 1.0 / z;
    cplx wn = w;
    cplx sum = 0.0;
    for (int n = 0; n < 120; ++n) {
      const cplx add = wn * (1.0 / (n + 3.0) - eta1_sq / (n + 1.0));
      sum -= add;
      if (std::abs(add) <= 1e-18 * std::abs(sum)) break;
      wn *= w;
    }
    return sum;
  }
  return 0.5 + z + (z * z - eta1_sq) * std::log(1.0 - 1.0 / z);
}

}  // namespace detail

/// Case dispersion function 1 + (z/2) int_{-1}^{1} d tau / (tau - z), cut on
/// [-1, 1]. A real argument inside (-1, 1) returns the principal-value form.
inline cplx case_lambda(cplx z) {
  detail::guard_endpoints(z, "case_lambda");
  if (detail::on_cut(z)) {
    const double mu = z.real();
    if (mu == 0.0) return 1.0;
    return 1.0 + 0.5 * mu * std::log((1.0 - mu) / (1.0 + mu));
  }
  if (std::abs(z) > detail::kSeriesRadius) return detail::case_lambda_series(z);
  return 1.0 + 0.5 * z * std::log((1.0 - z) / (-1.0 - z));
}

namespace detail {

// Unguarded on-cut closed forms, for quadrature nodes inside the guard bands.
inline double case_lambda_cut_raw(double mu) {
  if (mu == 0.0) return 1.0;
  return 1.0 + 0.5 * mu * std::log((1.0 - mu) / (1.0 + mu));
}

}  // namespace detail

inline double case_lambda_cut(double mu) {
  if (!(std::abs(mu) < 1.0 - kEndpointGuard)) {
    throw Error(ErrorKind::endpoint, "case_lambda_cut: mu must lie strictly inside (-1, 1)");
  }
  return detail::case_lambda_cut_raw(mu);
}

/// Derivative of the Case function off the cut.
inline cplx case_lambda_prime(cplx z) {
  detail::guard_endpoints(z, "case_lambda_prime");
  if (detail::on_cut(z)) throw Error(ErrorKind::cut, "case_lambda_prime: argument on the cut");
  if (std::abs(z) > detail::kSeriesRadius) return detail::case_lambda_series_prime(z);
  return (case_lambda(z) - 1.0) / z - z / (1.0 - z * z);
}

/// Dispersion function lambda(z) = 1 - 1/z0 + (1/z0)(1 - z^2/eta1^2) lambda_c(z).
inline cplx lambda(cplx z, const PlasmaParameters& p) {
  return 1.0 - 1.0 / p.z0 + (1.0 - z * z / p.eta1_sq) * case_lambda(z) / p.z0;
}

namespace detail {

inline cplx lambda_cut_raw(double mu, const PlasmaParameters& p) {
  return 1.0 - 1.0 / p.z0 + (1.0 - mu * mu / p.eta1_sq) * case_lambda_cut_raw(mu) / p.z0;
}

}  // namespace detail

/// Principal-value dispersion function on the cut.
inline cplx lambda_cut(double mu, const PlasmaParameters& p) {
  case_lambda_cut(mu);  // endpoint guard
  return detail::lambda_cut_raw(mu, p);
}

/// Analytic derivative lambda'(z) off the cut.
inline cplx lambda_prime(cplx z, const PlasmaParameters& p) {
  const cplx lc = case_lambda(z);
  const cplx dlc = case_lambda_prime(z);
  return (-2.0 * z / p.eta1_sq * lc + (1.0 - z * z / p.eta1_sq) * dlc) / p.z0;
}

/// Five-point central difference; the step shrinks with the distance to the
/// cut so the stencil stays inside the region of analyticity.
inline cplx lambda_prime_numeric(cplx z, const PlasmaParameters& p) {
  const cplx foot(std::clamp(z.real(), -1.0, 1.0), 0.0);
  const double reach = std::min(std::abs(z), std::abs(z - foot));
  const double h = 2e-3 * std::min(1.0, reach);
  return (8.0 * (lambda(z + h, p) - lambda(z - h, p)) - (lambda(z + 2.0 * h, p) - lambda(z - 2.0 * h, p))) /
         (12.0 * h);
}

struct BoundaryValues {
  cplx plus;
  cplx minus;
};

/// Jump term i pi mu (eta1^2 - mu^2) / (2 c) of the Sokhotski formulas.
inline cplx lambda_half_jump(double mu, const PlasmaParameters& p) {
  return cplx(0.0, std::numbers::pi) * mu * (p.eta1_sq - mu * mu) / (2.0 * p.c);
}

/// Boundary values lambda^{+-}(mu) from above and below the cut.
inline BoundaryValues lambda_boundary(double mu, const PlasmaParameters& p) {
  const cplx mean = lambda_cut(mu, p);
  const cplx jump = lambda_half_jump(mu, p);
  return {mean + jump, mean - jump};
}

/// Evaluation record of lambda; boundary values present for points on the cut.
struct DispersionSample {
  cplx z;
  cplx lambda;
  std::optional<cplx> lambda_plus;
  std::optional<cplx> lambda_minus;
};

inline DispersionSample dispersion_sample(cplx z, const PlasmaParameters& p) {
  DispersionSample s{z, lambda(z, p), std::nullopt, std::nullopt};
  if (detail::on_cut(z)) {
    const BoundaryValues bv = lambda_boundary(z.real(), p);
    s.lambda_plus = bv.plus;
    s.lambda_minus = bv.minus;
  }
  return s;
}

/// lambda(z) = lambda_inf + lambda_2 / z^2 + lambda_4 / z^4 + ...
struct LaurentHead {
  cplx inf;
  cplx l2;
  cplx l4;
};

/// Laurent coefficients written through z0 and eta1^2.
inline LaurentHead laurent_head_z0(const PlasmaParameters& p) {
  return {p.lambda_inf(), -(1.0 / 3.0 - 1.0 / (5.0 * p.eta1_sq)) / p.z0,
          -(1.0 / 5.0 - 1.0 / (7.0 * p.eta1_sq)) / p.z0};
}

/// Laurent coefficients written through (gamma, eps).
inline LaurentHead laurent_head_gamma_eps(double gamma, double eps) {
  const cplx ie(0.0, eps);
  const cplx d = 1.0 + gamma + ie;
  const cplx d2 = d * d;
  return {(2.0 * gamma + ie + gamma * (gamma + ie)) / d2, -(9.0 + 5.0 * ie * d) / (15.0 * d2),
          -(15.0 + 7.0 * ie * d) / (35.0 * d2)};
}

/// Laurent head; both formula families are evaluated and must agree.
inline LaurentHead laurent_head(const PlasmaParameters& p) {
  const LaurentHead a = laurent_head_z0(p);
  const LaurentHead b = laurent_head_gamma_eps(p.gamma, p.eps);
  auto close = [](cplx x, cplx y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)); };
  if (!close(a.inf, b.inf) || !close(a.l2, b.l2) || !close(a.l4, b.l4)) {
    throw Error(ErrorKind::residual, "Laurent coefficient families disagree");
  }
  return a;
}

/// T0(z) = (1/(2c)) int_0^1 (eta^2 - eta1^2) / (eta - z) d eta, cut on [0, 1].
inline cplx t0(cplx z, const PlasmaParameters& p) {
  if (z.imag() == 0.0 && z.real() >= 0.0 && z.real() <= 1.0) {
    throw Error(ErrorKind::cut, "t0: argument on the cut [0, 1]");
  }
  return detail::t0_integral(z, p.eta1_sq) / (2.0 * p.c);
}

/// Principal-value T on the cut: (eta/(2c)) [1 + (eta^2 - eta1^2) ln(1/eta^2 - 1)].
inline cplx t_func_cut(double eta, const PlasmaParameters& p) {
  const double a = std::abs(eta);
  if (!(a > kEndpointGuard) || !(a < 1.0 - kEndpointGuard)) {
    throw Error(ErrorKind::endpoint, "t_func: on-cut evaluation at an endpoint -1, 0 or 1");
  }
  return eta / (2.0 * p.c) * (1.0 + (eta * eta - p.eta1_sq) * std::log(1.0 / (eta * eta) - 1.0));
}

/// T(z) = (1/(2c)) int_{-1}^{1} mu (mu^2 - eta1^2) sign(mu) / (mu - z) d mu.
inline cplx t_func(cplx z, const PlasmaParameters& p) {
  detail::guard_endpoints(z, "t_func");
  if (detail::on_cut(z)) return t_func_cut(z.real(), p);
  return z * (t0(z, p) + t0(-z, p));
}

/// Boundary values T^{+-}(eta) on the cut.
inline BoundaryValues t_boundary(double eta, const PlasmaParameters& p) {
  const cplx mean = t_func_cut(eta, p);
  const cplx jump = cplx(0.0, std::numbers::pi) * std::abs(eta) * (eta * eta - p.eta1_sq) / (2.0 * p.c);
  return {mean + jump, mean - jump};
}

/// lambda(eta) + T(eta) = 1 + 2 eta T0(-eta) on (0, 1), in closed form; this
/// is also the function T2.
namespace detail {

inline cplx lambda_plus_t_raw(double eta, const PlasmaParameters& p) {
  return 1.0 + (eta - 2.0 * eta * eta + 2.0 * eta * (eta * eta - p.eta1_sq) * std::log(1.0 / eta + 1.0)) /
                   (2.0 * p.c);
}

}  // namespace detail

inline cplx lambda_plus_t(double eta, const PlasmaParameters& p) {
  if (!(eta > kEndpointGuard) || !(eta < 1.0 - kEndpointGuard)) {
    throw Error(ErrorKind::endpoint, "lambda_plus_t: eta must lie strictly inside (0, 1)");
  }
  return detail::lambda_plus_t_raw(eta, p);
}

}  // namespace halfspace
