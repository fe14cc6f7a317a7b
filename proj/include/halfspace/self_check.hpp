#pragma once

// Built-in invariant battery: identities of the dispersion function,
// spectrum cross-checks, closed forms against definitional quadrature, and
// closure of the full solution at a fixed set of parameters.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "halfspace/coefficients.hpp"
#include "halfspace/dispersion.hpp"
#include "halfspace/reconstruction.hpp"
#include "halfspace/spectrum.hpp"

namespace halfspace::check {

struct CheckResult {
  std::string name;
  double value = 0.0;  // worst observed residual
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct CheckOptions {
  bool flip_t0_sign = false;  // mutation hook: the representation checks must catch it
};

struct BatteryPoint {
  double gamma, eps, alpha_p;
  cplx e0;
};

inline std::vector<BatteryPoint> default_battery() {
  return {{0.0, 0.1, 0.5, {1.0, 0.0}},
          {3.0, 3.0, 0.5, {1.0, 0.0}},
          {0.5, 1.0, 1.0, {1.0, 0.0}},
          {-0.5, 0.1, 0.1, {1.0, 0.0}},
          {0.0, 3.0, 0.9, {0.5, -0.2}}};
}

namespace detail {

inline std::vector<cplx> probe_points() {
  return {{2.0, 0.5}, {0.3, 0.7}, {-1.5, -0.2}, {0.1, -2.0}, {5.0, 3.0}, {0.9, 0.01}, {-0.4, 0.3}, {12.0, -7.0}};
}

inline CheckResult finish(std::string name, double worst, double tol, std::string detail = {}) {
  return {std::move(name), worst, tol, worst <= tol, std::move(detail)};
}

}  // namespace detail

inline std::vector<CheckResult> run_battery(const CheckOptions& opt = {}) {
  std::vector<CheckResult> out;
  const auto battery = default_battery();
  std::vector<PlasmaParameters> params;
  for (const auto& b : battery) params.push_back(PlasmaParameters::make(b.gamma, b.eps, b.alpha_p, b.e0));
  const double sign = opt.flip_t0_sign ? -1.0 : 1.0;
  auto t0s = [&](cplx z, const PlasmaParameters& p) { return sign * t0(z, p); };

  // evenness
  {
    double worst = 0.0;
    for (const auto& p : params)
      for (const cplx z : detail::probe_points())
        worst = std::max(worst, std::abs(lambda(z, p) - lambda(-z, p)) / std::max(1.0, std::abs(lambda(z, p))));
    out.push_back(detail::finish("dispersion.evenness", worst, 1e-12));
  }
  // boundary values from just above and below the cut
  {
    double worst = 0.0;
    const double delta = 1e-11;
    for (const auto& p : params)
      for (const double mu : {-0.7, -0.2, 0.15, 0.5, 0.9}) {
        const BoundaryValues bv = lambda_boundary(mu, p);
        worst = std::max(worst, std::abs(lambda(cplx(mu, delta), p) - bv.plus) / std::abs(bv.plus));
        worst = std::max(worst, std::abs(lambda(cplx(mu, -delta), p) - bv.minus) / std::abs(bv.minus));
      }
    out.push_back(detail::finish("dispersion.sokhotski", worst, 1e-8));
  }
  // value at infinity
  {
    double worst = 0.0;
    for (const auto& p : params) {
      const cplx li = p.lambda_inf();
      worst = std::max(worst, std::abs(li - (p.lambda_1() + 1.0 / (3.0 * p.c))) / std::abs(li));
      worst = std::max(worst, std::abs(li - laurent_head_gamma_eps(p.gamma, p.eps).inf) / std::abs(li));
    }
    out.push_back(detail::finish("dispersion.lambda_inf", worst, 1e-12));
  }
  // lambda and T through T0
  {
    double worst_l = 0.0, worst_t = 0.0;
    for (const auto& p : params)
      for (const cplx z : detail::probe_points()) {
        const cplx l = lambda(z, p);
        const cplx rep = 1.0 - z * t0s(z, p) + z * t0s(-z, p);
        worst_l = std::max(worst_l, std::abs(l - rep) / std::max(1.0, std::abs(l)));
      }
    for (const auto& p : params)
      for (const double eta : {0.2, 0.6, 0.95}) {
        const cplx up(eta, 1e-12), dn(eta, -1e-12);
        const cplx mean = 0.5 * (up * (t0s(up, p) + t0s(-up, p)) + dn * (t0s(dn, p) + t0s(-dn, p)));
        const cplx ref = t_func_cut(eta, p);
        worst_t = std::max(worst_t, std::abs(mean - ref) / std::max(1.0, std::abs(ref)));
        const cplx t2 = 1.0 + 2.0 * eta * t0s(cplx(-eta, 0.0), p);
        worst_t = std::max(worst_t, std::abs(t2 - lambda_plus_t(eta, p)) / std::abs(t2));
      }
    out.push_back(detail::finish("dispersion.representation_lambda", worst_l, 1e-10));
    out.push_back(detail::finish("dispersion.representation_t", worst_t, 1e-8));
  }
  // Laurent head against direct evaluation far out
  {
    double worst = 0.0;
    for (const auto& p : params) {
      const LaurentHead h = laurent_head(p);
      for (const cplx z : {cplx(60.0, 10.0), cplx(-20.0, 45.0)}) {
        const cplx z2 = 1.0 / (z * z);
        const cplx approx = h.inf + h.l2 * z2 + h.l4 * z2 * z2;
        worst = std::max(worst, std::abs(lambda(z, p) - approx) / std::abs(h.inf));
      }
    }
    out.push_back(detail::finish("dispersion.laurent", worst, 1e-7));
  }
  // argument principle vs index, eta0 quality
  std::vector<SpectrumClassification> spectra;
  {
    double worst_count = 0.0, worst_zero = 0.0;
    std::string detail_count;
    for (const auto& p : params) {
      const SpectrumClassification s = classify(p);
      spectra.push_back(s);
      const int n = contour_zero_count(p, default_contour_radius(p));
      if (n != 2 * s.kappa) {
        worst_count = 1.0;
        detail_count += "N=" + std::to_string(n) + " kappa=" + std::to_string(s.kappa) + "; ";
      }
      if (s.eta0) {
        const double li = std::abs(p.lambda_inf());
        worst_zero = std::max({worst_zero, std::abs(lambda(*s.eta0, p)) / li, std::abs(lambda(-*s.eta0, p)) / li});
        if (count_zeros_in_disk(p, *s.eta0, eta0_check_radius(*s.eta0)) != 1) worst_zero = 1.0;
      }
    }
    out.push_back(detail::finish("spectrum.zero_count", worst_count, 0.0, detail_count));
    out.push_back(detail::finish("spectrum.eta0", worst_zero, 1e-10));
  }
  // m(+-eta0) against the defining integral
  {
    double worst = 0.0;
    numerics::QuadratureSpec q;
    q.rel_tol = 1e-12;
    q.abs_tol = 1e-14;
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (!spectra[i].eta0) continue;
      const auto& p = params[i];
      for (const int s : {1, -1}) {
        const cplx w = static_cast<double>(s) * *spectra[i].eta0;
        const cplx quad = numerics::integrate(
            [&](double mu) { return (mu * mu - 2.0 / 3.0 * mu) * (w * mu - p.eta1_sq) / (w - mu); }, 0.0, 1.0, q);
        const cplx closed = m_discrete(p, *spectra[i].eta0, s);
        worst = std::max(worst, std::abs(quad - closed) / std::max(1.0, std::abs(closed)));
      }
    }
    out.push_back(detail::finish("coefficients.m_discrete", worst, 1e-9));
  }
  // residue forms of J1 against jump quadrature
  {
    double worst = 0.0;
    auto q = default_coefficient_quadrature();
    q.rel_tol = 1e-12;
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto& p = params[i];
      std::optional<AbFactors> ab;
      if (spectra[i].eta0) ab = ab_factors(*spectra[i].eta0, p);
      const JIntegrals j = j_integrals(p, ab);
      const cplx quad = numerics::integrate(
          [&](double eta) -> cplx {
            eta = halfspace::detail::clamp_unit(eta);
            return eta * eta / (p.c * halfspace::detail::boundary_product(eta, p));
          },
          0.0, 1.0, q);
      worst = std::max(worst, std::abs(quad - j.j1) / std::max(1.0, std::abs(j.j1)));
    }
    out.push_back(detail::finish("coefficients.j1", worst, 1e-7));
  }
  // solution closure
  {
    double worst_sys = 0.0, worst_bc = 0.0, worst_alpha = 0.0;
    for (const auto& p : params) {
      const Verification v = verify_all(p);
      worst_sys = std::max(worst_sys, v.residuals.system.max());
      worst_bc = std::max({worst_bc, v.residuals.field_bc, v.residuals.nonflow, v.residuals.spec_accom,
                           v.residuals.accom_integral});
      worst_alpha = std::max(worst_alpha, v.residuals.alpha_error);
    }
    out.push_back(detail::finish("coefficients.system", worst_sys, kResidualTolerance));
    out.push_back(detail::finish("reconstruction.boundary_conditions", worst_bc, ResidualReport::kTolerance));
    out.push_back(detail::finish("reconstruction.accommodation", worst_alpha, ResidualReport::kAlphaTolerance));
  }
  // discrete modes solve the kinetic system
  {
    double worst_drude = 0.0, worst_debye = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i)
      for (const double x : {0.0, 0.7, 3.0})
        for (const double mu : {-0.8, -0.1, 0.4, 0.95}) {
          const ModeResidual d = mode_pde_residual(params[i], spectra[i], Mode::drude, x, mu);
          worst_drude = std::max({worst_drude, d.kinetic, d.field});
          if (spectra[i].eta0) {
            const ModeResidual b = mode_pde_residual(params[i], spectra[i], Mode::debye, x, mu);
            worst_debye = std::max({worst_debye, b.kinetic, b.field});
          }
        }
    out.push_back(detail::finish("reconstruction.drude_mode", worst_drude, 1e-12));
    out.push_back(detail::finish("reconstruction.debye_mode", worst_debye, 1e-9));
  }
  return out;
}

}  // namespace halfspace::check
