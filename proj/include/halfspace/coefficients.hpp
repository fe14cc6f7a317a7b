#pragma once

// Expansion coefficients of the half-space solution: Drude amplitude E_inf,
// Debye amplitude E0, boundary constant A1 and the continuous density E(eta),
// with the auxiliary quantities they are built from and the residuals of the
// defining system.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "halfspace/dispersion.hpp"
#include "halfspace/numerics.hpp"
#include "halfspace/spectrum.hpp"

namespace halfspace {

/// Residual failure carrying the individual residual values.
class ResidualError : public Error {
 public:
  ResidualError(const std::string& msg, std::vector<std::pair<std::string, double>> residuals)
      : Error(ErrorKind::residual, msg), residuals_(std::move(residuals)) {}
  const std::vector<std::pair<std::string, double>>& residuals() const { return residuals_; }

 private:
  std::vector<std::pair<std::string, double>> residuals_;
};

inline numerics::QuadratureSpec default_coefficient_quadrature() {
  numerics::QuadratureSpec s;
  s.endpoint_mode = numerics::EndpointMode::log_refined;
  return s;
}

namespace detail {

// Integrands over (0, 1) stay bounded at both ends and are evaluated with the
// unguarded closed forms; nodes closer than kUnitMargin to 0 or 1 are frozen.
inline constexpr double kUnitMargin = 1e-14;

inline double clamp_unit(double eta) { return std::clamp(eta, kUnitMargin, 1.0 - kUnitMargin); }

inline cplx boundary_product(double eta, const PlasmaParameters& p) {
  const cplx mean = lambda_cut_raw(eta, p);
  const cplx jump = lambda_half_jump(eta, p);
  return (mean + jump) * (mean - jump);
}

inline cplx m_continuum_raw(double eta, const PlasmaParameters& p) {
  const cplx q = eta * eta - p.eta1_sq;
  const double poly = eta * eta - 2.0 * eta / 3.0;
  if (eta < 0.0) {
    return q * (1.0 / 6.0 - eta - poly * std::log(1.0 - 1.0 / eta));
  }
  return q * (1.0 / 6.0 - eta - poly * std::log((1.0 - eta) / eta)) -
         2.0 * p.c * (eta - 2.0 / 3.0) * lambda_cut_raw(eta, p);
}

inline cplx density_raw(double eta, const PlasmaParameters& p, cplx c1, cplx z0a1) {
  return (c1 * eta * eta + 2.0 / 3.0 * z0a1 * eta * lambda_plus_t_raw(eta, p)) / (2.0 * p.c * boundary_product(eta, p));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// m functions

/// m(+-eta0) = int_0^1 (mu^2 - 2mu/3) F(+-eta0, mu) d mu in closed form.
inline cplx m_discrete(const PlasmaParameters& p, cplx eta0, int sign) {
  if (sign != 1 && sign != -1) throw Error(ErrorKind::validation, "sign must be +1 or -1", "sign");
  const double s = sign;
  const cplx w = s * eta0;  // m(-eta0) is m(+eta) at eta = -eta0
  if (w.imag() == 0.0 && w.real() > 0.0 && w.real() <= 1.0) {
    throw Error(ErrorKind::cut, "m_discrete: argument on [0, 1]");
  }
  cplx bracket;
  if (std::abs(w) > 4.0) {
    // bracket = sum_k u^k (1 - k) / (3 (k + 1)(k + 2)), u = 1 / w
    const cplx u = 1.0 / w;
    numerics::CompensatedSum<cplx> acc;
    cplx uk = u;
    for (int k = 1; k < 60; ++k) {
      acc.add(uk * (1.0 - k) / (3.0 * (k + 1) * (k + 2)));
      uk *= u;
    }
    bracket = acc.value();
  } else {
    bracket = -1.0 / 6.0 + w + (w * w - 2.0 * w / 3.0) * std::log(1.0 - 1.0 / w);
  }
  return (p.eta1_sq - eta0 * eta0) * bracket;
}

/// m(eta) on (-1, 1) \ {0}; on (0, 1) the delta part of F contributes the
/// lambda(eta) term.
inline cplx m_continuum(double eta, const PlasmaParameters& p) {
  if (!(std::abs(eta) > kEndpointGuard) || !(std::abs(eta) < 1.0 - kEndpointGuard)) {
    throw Error(ErrorKind::endpoint, "m_continuum: eta at 0 or +-1", "eta");
  }
  return detail::m_continuum_raw(eta, p);
}

// ---------------------------------------------------------------------------
// Residue factors

struct AbFactors {
  cplx a;
  cplx b;
  cplx lambda_prime;     // analytic
  cplx lambda_prime_fd;  // central difference
};

inline AbFactors ab_factors(cplx eta0, const PlasmaParameters& p) {
  AbFactors f;
  f.lambda_prime = lambda_prime(eta0, p);
  f.lambda_prime_fd = lambda_prime_numeric(eta0, p);
  if (!(std::abs(f.lambda_prime) > 1e-12 * std::abs(p.lambda_inf()))) {
    throw Error(ErrorKind::degenerate, "lambda'(eta0) vanishes: zero is not simple");
  }
  const cplx q = eta0 * eta0 - p.eta1_sq;
  if (!(std::abs(q) > 1e-14 * std::abs(p.eta1_sq))) {
    throw Error(ErrorKind::degenerate, "eta0^2 coincides with eta1^2");
  }
  const cplx den = f.lambda_prime * q;
  f.a = eta0 / den;
  f.b = t_func(eta0, p) / den;
  return f;
}

struct JIntegrals {
  cplx j1;
  cplx j2;
};

/// Residue forms of the jump integrals; the eta0 terms appear only in D+.
inline JIntegrals j_integrals(const PlasmaParameters& p, const std::optional<AbFactors>& ab) {
  const cplx l1 = p.lambda_1();
  if (!(std::abs(l1) > 1e-14)) throw Error(ErrorKind::resonance, "lambda(eta1) vanishes");
  JIntegrals j;
  j.j1 = -1.0 / p.lambda_inf() + 1.0 / l1;
  j.j2 = 1.0 / (2.0 * l1 * p.c);
  if (ab) {
    j.j1 += 2.0 * ab->a;
    j.j2 += 2.0 * ab->b;
  }
  return j;
}

struct PIntegrals {
  cplx p1;
  cplx p2;
};

/// P1 = (1/c) int_0^1 eta^2 m / (lambda^+ lambda^-),
/// P2 = (1/c) int_0^1 eta T2 m / (lambda^+ lambda^-).
inline PIntegrals p_integrals(const PlasmaParameters& p,
                              const numerics::QuadratureSpec& spec = default_coefficient_quadrature()) {
  auto f1 = [&](double eta) -> cplx {
    eta = detail::clamp_unit(eta);
    return eta * eta * detail::m_continuum_raw(eta, p) / detail::boundary_product(eta, p);
  };
  auto f2 = [&](double eta) -> cplx {
    eta = detail::clamp_unit(eta);
    return eta * detail::lambda_plus_t_raw(eta, p) * detail::m_continuum_raw(eta, p) / detail::boundary_product(eta, p);
  };
  return {numerics::integrate(f1, 0.0, 1.0, spec) / p.c, numerics::integrate(f2, 0.0, 1.0, spec) / p.c};
}

// ---------------------------------------------------------------------------
// Coefficients

/// E_inf = e0 lambda(eta1) / lambda_inf.
inline cplx e_infty_coeff(const PlasmaParameters& p) { return p.e0 * p.lambda_1() / p.lambda_inf(); }

/// E0 from the pole-elimination relation.
inline cplx e_debye_coeff(const PlasmaParameters& p, const AbFactors& ab, cplx z0a1) {
  return -2.0 * p.e0 * p.lambda_1() * ab.a - z0a1 * (2.0 / 3.0 * ab.b - p.lambda_inf() * ab.a);
}

/// z0 A1 from the accommodation condition. With alpha_p = 0 the condition
/// degenerates and A1 = 0.
inline cplx a1_constant(const PlasmaParameters& p, const std::optional<AbFactors>& ab, cplx m0,
                        const PIntegrals& pi) {
  if (p.alpha_p == 0.0) return 0.0;
  const cplx li = p.lambda_inf();
  cplx num = -1.0 / (36.0 * li) - pi.p1;
  cplx den = pi.p2 / 3.0 - li * pi.p1 / 2.0 + (1.0 - p.alpha_p) / (36.0 * p.alpha_p);
  if (ab) {
    num += 2.0 * ab->a * m0;
    den += (li * ab->a - 2.0 / 3.0 * ab->b) * m0;
  }
  const double scale = std::abs(pi.p2) + std::abs(li * pi.p1) + 1.0 / 36.0;
  if (!(std::abs(den) > 1e-13 * scale)) {
    throw Error(ErrorKind::degenerate, "A1 denominator vanishes: " + std::to_string(std::abs(den)));
  }
  return p.e0 * p.lambda_1() * num / den;
}

/// E(eta) = [C1 eta^2 + (2/3) z0A1 eta T2(eta)] / (2c lambda^+ lambda^-).
inline cplx e_continuum(double eta, const PlasmaParameters& p, cplx z0a1, cplx e_inf) {
  const cplx c1 = (2.0 * e_inf - z0a1) * p.lambda_inf();
  return (c1 * eta * eta + 2.0 / 3.0 * z0a1 * eta * lambda_plus_t(eta, p)) /
         (2.0 * p.c * detail::boundary_product(eta, p));
}

/// E(eta) from the jump of the sectionally analytic solution, before the
/// boundary-value identities are applied.
inline cplx e_continuum_jump(double eta, const PlasmaParameters& p, cplx z0a1, cplx e_inf) {
  const cplx c1 = (2.0 * e_inf - z0a1) * p.lambda_inf();
  const BoundaryValues lb = lambda_boundary(eta, p);
  const BoundaryValues tb = t_boundary(eta, p);
  const cplx jump = 2.0 / 3.0 * z0a1 * (tb.plus / lb.plus - tb.minus / lb.minus) +
                    c1 * eta * (1.0 / lb.plus - 1.0 / lb.minus);
  return jump / (cplx(0.0, 2.0 * std::numbers::pi) * (eta * eta - p.eta1_sq));
}

struct CoefficientSet {
  PlasmaParameters params;
  cplx e_infty;
  cplx e_debye;  // zero in D-
  cplx z0a1;
  cplx a1;
  cplx a0;  // -(2/3) A1
  cplx c1;  // (2 E_inf - z0 A1) lambda_inf
  std::vector<double> eta_grid;
  std::vector<cplx> density;

  /// E(eta) on [0, 1], for use as an integrand; zero outside.
  cplx density_at(double eta) const {
    if (!(eta >= 0.0 && eta <= 1.0)) return 0.0;
    return detail::density_raw(detail::clamp_unit(eta), params, c1, z0a1);
  }
};

struct Auxiliaries {
  std::optional<AbFactors> ab;
  cplx m_plus{0.0, 0.0};   // m(eta0)
  cplx m_minus{0.0, 0.0};  // m(-eta0)
  JIntegrals j{};
  PIntegrals pint{};
};

struct SystemResiduals {
  double pole = 0.0;           // Debye pole elimination
  double field = 0.0;          // E_inf + E0 + int E = e0
  double accommodation = 0.0;  // integral accommodation condition

  double max() const { return std::max({pole, field, accommodation}); }
  std::vector<std::pair<std::string, double>> named() const {
    return {{"pole", pole}, {"field", field}, {"accommodation", accommodation}};
  }
};

struct Solution {
  PlasmaParameters params;
  SpectrumClassification spectrum;
  Auxiliaries aux;
  CoefficientSet coeffs;
  SystemResiduals residuals;
};

inline constexpr double kResidualTolerance = 1e-6;

struct SolveOptions {
  SpectrumOptions spectrum{};
  numerics::QuadratureSpec quadrature = default_coefficient_quadrature();
  int density_samples = 64;
};

/// Residuals of the defining system for a computed coefficient set.
inline SystemResiduals system_residuals(const Solution& s, const numerics::QuadratureSpec& spec) {
  const PlasmaParameters& p = s.params;
  const CoefficientSet& cs = s.coeffs;
  const double e0n = std::max(std::abs(p.e0), std::numeric_limits<double>::min());
  SystemResiduals r;
  if (s.spectrum.eta0 && s.aux.ab) {
    const cplx eta0 = *s.spectrum.eta0;
    const cplx li = p.lambda_inf();
    const cplx lhs = cs.z0a1 * (2.0 / 3.0 * t_func(eta0, p) - li * eta0);
    const cplx rhs = cs.e_debye * s.aux.ab->lambda_prime * (p.eta1_sq - eta0 * eta0) - 2.0 * cs.e_infty * li * eta0;
    const double scale = std::abs(cs.e_debye * s.aux.ab->lambda_prime * (p.eta1_sq - eta0 * eta0)) +
                         std::abs(2.0 * cs.e_infty * li * eta0) + std::abs(lhs);
    r.pole = scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
  }
  const cplx int_e = numerics::integrate([&](double eta) { return cs.density_at(eta); }, 0.0, 1.0, spec);
  r.field = std::abs(cs.e_infty + cs.e_debye + int_e - p.e0) / e0n;

  const cplx int_me = numerics::integrate(
      [&](double eta) -> cplx {
        eta = detail::clamp_unit(eta);
        return detail::m_continuum_raw(eta, p) * cs.density_at(eta);
      },
      0.0, 1.0, spec);
  const cplx lhs = cs.e_infty / 36.0 + cs.e_debye * s.aux.m_plus + int_me;
  if (p.alpha_p > 0.0) {
    r.accommodation = std::abs(lhs + cs.z0a1 * (1.0 - p.alpha_p) / (36.0 * p.alpha_p)) / e0n;
  } else {
    r.accommodation = std::abs(cs.z0a1) / e0n;
  }
  return r;
}

/// Full coefficient pipeline without the residual gate.
inline Solution solve_unchecked(const PlasmaParameters& p, const SolveOptions& opt = {}) {
  Solution s;
  s.params = p;
  s.spectrum = classify(p, opt.spectrum);
  if (s.spectrum.region == Region::anomalous) {
    throw Error(ErrorKind::degenerate, "index of G is " + std::to_string(s.spectrum.kappa) + ": anomalous spectrum");
  }
  if (s.spectrum.eta0) {
    const cplx eta0 = *s.spectrum.eta0;
    s.aux.ab = ab_factors(eta0, p);
    s.aux.m_plus = m_discrete(p, eta0, 1);
    s.aux.m_minus = m_discrete(p, eta0, -1);
  }
  s.aux.j = j_integrals(p, s.aux.ab);
  s.aux.pint = p_integrals(p, opt.quadrature);

  CoefficientSet& cs = s.coeffs;
  cs.params = p;
  cs.e_infty = e_infty_coeff(p);
  cs.z0a1 = a1_constant(p, s.aux.ab, s.aux.m_plus, s.aux.pint);
  cs.a1 = cs.z0a1 / p.z0;
  cs.a0 = -2.0 / 3.0 * cs.a1;
  cs.c1 = (2.0 * cs.e_infty - cs.z0a1) * p.lambda_inf();
  cs.e_debye = s.aux.ab ? e_debye_coeff(p, *s.aux.ab, cs.z0a1) : cplx(0.0, 0.0);

  const auto [nodes, weights] = numerics::gauss_legendre(opt.density_samples);
  cs.eta_grid.reserve(nodes.size());
  cs.density.reserve(nodes.size());
  for (const double x : nodes) {
    const double eta = 0.5 * (x + 1.0);
    cs.eta_grid.push_back(eta);
    cs.density.push_back(cs.density_at(eta));
  }
  s.residuals = system_residuals(s, opt.quadrature);
  return s;
}

/// Coefficient pipeline; fails when any system residual exceeds the tolerance.
inline Solution solve_all(const PlasmaParameters& p, const SolveOptions& opt = {}) {
  Solution s = solve_unchecked(p, opt);
  if (!(s.residuals.max() <= kResidualTolerance)) {
    throw ResidualError("coefficient system residual above tolerance", s.residuals.named());
  }
  return s;
}

}  // namespace halfspace
