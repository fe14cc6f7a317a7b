#pragma once

// Independent reference values built straight from the defining integrals.
// Nothing here calls into the library's closed forms or its quadrature: the
// integrals go through Boost's tanh-sinh rule and principal values are taken
// by symmetric folding about the pole.

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

struct Params {
  double gamma, eps;
  cplx z0, eta1_sq, c;
};

inline Params params(double gamma, double eps) {
  Params p{gamma, eps, {}, {}, {}};
  p.z0 = cplx(1.0, -(1.0 + gamma) / eps);
  p.eta1_sq = cplx(eps * eps / 3.0, -eps * (1.0 + gamma) / 3.0);
  p.c = p.eta1_sq * p.z0;
  return p;
}

// One shared integrator; tanh_sinh keeps its abscissa tables internally.
inline boost::math::quadrature::tanh_sinh<double>& rule() {
  static thread_local boost::math::quadrature::tanh_sinh<double> ts(15);
  return ts;
}

/// ∫_a^b f, complex integrand, optional interior breakpoints.
inline cplx integrate(const std::function<cplx(double)>& f, double a, double b, std::vector<double> breaks = {}) {
  std::vector<double> pts{a};
  for (double x : breaks)
    if (x > a && x < b) pts.push_back(x);
  pts.push_back(b);
  std::sort(pts.begin() + 1, pts.end() - 1);
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double lo = pts[k], hi = pts[k + 1];
    if (hi <= lo) continue;
    if (hi - lo < 1e-10) {  // sliver next to a breakpoint; one node is plenty
      const cplx v = f(0.5 * (lo + hi)) * (hi - lo);
      re += v.real();
      im += v.imag();
      continue;
    }
    re += rule().integrate([&](double x) { return f(x).real(); }, lo, hi, 1e-13);
    im += rule().integrate([&](double x) { return f(x).imag(); }, lo, hi, 1e-13);
  }
  return {re, im};
}

/// PV ∫_a^b f(t)/(t - pole) dt by folding the symmetric part about the pole.
inline cplx pv(const std::function<cplx(double)>& f, double a, double b, double pole) {
  const double d = std::min(pole - a, b - pole);
  cplx sum = integrate([&](double t) { return (f(pole + t) - f(pole - t)) / t; }, 0.0, d);
  if (pole - a > d) sum += integrate([&](double t) { return f(t) / (t - pole); }, a, pole - d);
  if (b - pole > d) sum += integrate([&](double t) { return f(t) / (t - pole); }, pole + d, b);
  return sum;
}

// Off-cut integrands get a breakpoint under the near-singularity.
inline std::vector<double> near(cplx z) { return {z.real()}; }

/// λ_c(z) = 1 + (z/2) ∫_{-1}^{1} dτ/(τ - z), off the cut.
inline cplx case_lambda(cplx z) {
  return 1.0 + 0.5 * z * integrate([&](double t) { return 1.0 / (t - z); }, -1.0, 1.0, near(z));
}

/// Principal-value λ_c on the cut.
inline double case_lambda_cut(double mu) {
  return 1.0 + 0.5 * mu * pv([](double) { return cplx(1.0); }, -1.0, 1.0, mu).real();
}

/// λ(z) = 1 - (z/2c) ∫_{-1}^{1} (τ² - η₁²)/(τ - z) dτ.
inline cplx lambda(cplx z, const Params& p) {
  return 1.0 - z / (2.0 * p.c) *
                   integrate([&](double t) { return (t * t - p.eta1_sq) / (t - z); }, -1.0, 1.0, near(z));
}

inline cplx lambda_cut(double mu, const Params& p) {
  return 1.0 - mu / (2.0 * p.c) * pv([&](double t) { return t * t - p.eta1_sq; }, -1.0, 1.0, mu);
}

/// Boundary values from 1/(τ - μ ∓ i0) = PV ± iπδ(τ - μ).
inline cplx lambda_side(double mu, const Params& p, int side) {
  const double pi = std::numbers::pi;
  return lambda_cut(mu, p) - mu / (2.0 * p.c) * cplx(0.0, side * pi) * (mu * mu - p.eta1_sq);
}

/// T₀(z) = (1/2c) ∫_0^1 (η² - η₁²)/(η - z) dη.
inline cplx t0(cplx z, const Params& p) {
  return integrate([&](double t) { return (t * t - p.eta1_sq) / (t - z); }, 0.0, 1.0, near(z)) / (2.0 * p.c);
}

/// T(z) = (z/2c) ∫_{-1}^{1} sign(τ)(τ² - η₁²)/(τ - z) dτ, on the cut in the
/// principal-value sense.
inline cplx t_cut(double eta, const Params& p) {
  if (eta < 0.0) return -t_cut(-eta, p);  // odd
  auto f = [&](double t) { return cplx(t * t) - p.eta1_sq; };
  const cplx pos = pv(f, 0.0, 1.0, eta);
  const cplx neg = integrate([&](double t) { return f(t) / (t - eta); }, -1.0, 0.0);
  return eta / (2.0 * p.c) * (pos - neg);
}

inline cplx t_side(double eta, const Params& p, int side) {
  const double pi = std::numbers::pi;
  const double sg = eta > 0 ? 1.0 : -1.0;
  return t_cut(eta, p) + eta / (2.0 * p.c) * cplx(0.0, side * pi) * sg * (eta * eta - p.eta1_sq);
}

/// m(w) = ∫_0^1 (μ² - 2μ/3)(wμ - η₁²)/(w - μ) dμ, w off [0, 1].
inline cplx m_discrete(cplx w, const Params& p) {
  return integrate([&](double mu) { return (mu * mu - 2.0 * mu / 3.0) * (w * mu - p.eta1_sq) / (w - mu); }, 0.0, 1.0,
                   near(w));
}

/// m(η) for real η: principal value plus the point term -2c(η - 2/3)λ(η) on (0, 1).
inline cplx m_continuum(double eta, const Params& p) {
  auto num = [&](double mu) { return (mu * mu - 2.0 * mu / 3.0) * (mu * eta - p.eta1_sq); };
  if (eta < 0.0) return integrate([&](double mu) { return num(mu) / (eta - mu); }, 0.0, 1.0);
  return -pv(num, 0.0, 1.0, eta) - 2.0 * p.c * (eta - 2.0 / 3.0) * lambda_cut(eta, p);
}

// The jump integrands vanish like 1/log² at ±1; the last 1e-12 is dropped.
inline constexpr double kEdge = 1.0 - 1e-12;

/// J₁ = (1/2πi) ∫_{-1}^{1} [1/λ⁺ - 1/λ⁻] η dη / (η² - η₁²).
inline cplx j1(const Params& p) {
  const cplx two_pi_i(0.0, 2.0 * std::numbers::pi);
  return integrate(
             [&](double eta) {
               return (1.0 / lambda_side(eta, p, 1) - 1.0 / lambda_side(eta, p, -1)) * eta / (eta * eta - p.eta1_sq);
             },
             -kEdge, kEdge, {0.0}) /
         two_pi_i;
}

/// J₂ = (1/2πi) ∫_{-1}^{1} [T⁺/λ⁺ - T⁻/λ⁻] dη / (η² - η₁²).
inline cplx j2(const Params& p) {
  const cplx two_pi_i(0.0, 2.0 * std::numbers::pi);
  return integrate(
             [&](double eta) {
               return (t_side(eta, p, 1) / lambda_side(eta, p, 1) - t_side(eta, p, -1) / lambda_side(eta, p, -1)) /
                      (eta * eta - p.eta1_sq);
             },
             -kEdge, kEdge, {0.0}) /
         two_pi_i;
}

}  // namespace oracle
