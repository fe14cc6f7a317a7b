#pragma once

// Discrete spectrum: index of G = lambda^+ / lambda^- on [0, 1], independent
// argument-principle zero count, the curve L bounding D+ in the (gamma, eps)
// plane, and location of the plasma-mode zero eta0.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "halfspace/dispersion.hpp"
#include "halfspace/numerics.hpp"

namespace halfspace {

struct GDecomposition {
  double mu = 0.0;
  double g = 0.0;   // [P+]^2 + [Q+]^2
  double g1 = 0.0;  // P+ P- + Q+ Q-
  double g2 = 0.0;  // P+ Q- - P- Q+
  double s = 0.0;   // (pi / 2) mu

  cplx G() const { return {g1 / g, g2 / g}; }
};

/// Real and imaginary parts of G(mu) = lambda^+(mu) / lambda^-(mu) in terms of
/// (gamma, eps), with the Case function evaluated on the cut.
inline GDecomposition g_decompose(double mu, const PlasmaParameters& p) {
  if (!(mu > 0.0 && mu < 1.0)) {
    throw Error(ErrorKind::validation, "g_decompose: mu must lie in (0, 1)", "mu");
  }
  const double lc = case_lambda_cut(mu);
  const double s = 0.5 * std::numbers::pi * mu;
  const double a = 1.0 + p.gamma;
  const double e = p.eps;
  const double w = e * e - 3.0 * mu * mu;
  const double p_plus = a * a - lc * w + e * a * s;
  const double p_minus = a * a - lc * w - e * a * s;
  const double q_plus = e * a * (1.0 + lc) + s * w;
  const double q_minus = e * a * (1.0 + lc) - s * w;
  GDecomposition d;
  d.mu = mu;
  d.s = s;
  d.g = p_plus * p_plus + q_plus * q_plus;
  d.g1 = p_plus * p_minus + q_plus * q_minus;
  d.g2 = p_plus * q_minus - p_minus * q_plus;
  const double scale = a * a + e * e + 3.0;
  if (!(d.g > 1e-24 * scale * scale)) {
    throw Error(ErrorKind::resonance, "g_decompose: boundary value of lambda vanishes");
  }
  return d;
}

struct SpectrumOptions {
  double near_l_threshold = 1e-6;  // |G| band around zero (and its reciprocal)
  double lambda_threshold = 1e-8;  // |lambda^{+-}| relative to |lambda_inf|
  int initial_samples = 64;
  int max_depth = 40;
};

namespace detail {

// lambda^{+-} at mu = 1 - d, written in the gap d so the logarithm stays
// accurate down to d ~ 1e-300.
inline BoundaryValues boundary_values_at_gap(double d, const PlasmaParameters& p) {
  const double mu = 1.0 - d;
  const double lc = 1.0 + 0.5 * mu * std::log(d / (2.0 - d));
  const cplx mean = 1.0 - 1.0 / p.z0 + (1.0 - mu * mu / p.eta1_sq) * lc / p.z0;
  const cplx half = cplx(0.0, 0.5 * std::numbers::pi) * mu * (p.eta1_sq - mu * mu) / p.c;
  return {mean + half, mean - half};
}

}  // namespace detail

/// The tracked range of G is split at mu = 1/2; beyond it G is followed in
/// s = -log(1 - mu) up to s = kWindingLogEnd, since zeros of lambda close to
/// mu = 1 make G turn within a tiny neighbourhood of the endpoint. The last
/// arc to G(1) = 1 is short and closed directly.
inline constexpr double kWindingSplit = 0.5;
inline constexpr double kWindingLogEnd = 690.0;

/// Index kappa(G) = Ind_[0,1] G, by continuous argument tracking from G(0) = 1.
inline int winding_index(const PlasmaParameters& p, const SpectrumOptions& opt = {}) {
  const double lam_floor = opt.lambda_threshold * std::abs(p.lambda_inf());
  double min_boundary = std::numeric_limits<double>::infinity();
  auto ratio = [&](const BoundaryValues& bv) -> cplx {
    min_boundary = std::min({min_boundary, std::abs(bv.plus), std::abs(bv.minus)});
    if (min_boundary < lam_floor) {
      throw Error(ErrorKind::near_l, "boundary value of lambda vanishes: parameters near the curve L");
    }
    return bv.plus / bv.minus;
  };
  auto g_mu = [&](double mu) { return ratio(lambda_boundary(mu, p)); };
  auto g_log = [&](double s) { return ratio(detail::boundary_values_at_gap(std::exp(-s), p)); };
  numerics::ArgumentTrack head, tail;
  try {
    head = numerics::track_argument(g_mu, 0.0, kWindingSplit, opt.initial_samples, opt.max_depth);
    // at most 0.25 per sample in s, whatever the caller asked for
    const double s0 = std::log(1.0 / (1.0 - kWindingSplit));
    const int n_log = std::max(4 * opt.initial_samples, static_cast<int>(std::ceil((kWindingLogEnd - s0) / 0.25)));
    tail = numerics::track_argument(g_log, s0, kWindingLogEnd, n_log, opt.max_depth);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::near_l) throw;
    throw Error(ErrorKind::near_l, std::string("G(mu) not resolvable: ") + e.what());
  }
  const double lo = std::min(head.min_modulus, tail.min_modulus);
  const double hi = std::max(head.max_modulus, tail.max_modulus);
  if (lo < opt.near_l_threshold || hi > 1.0 / opt.near_l_threshold) {
    throw Error(ErrorKind::near_l, "|G(mu)| enters the near-L band");
  }
  const double turns = (head.angle + tail.angle - std::arg(tail.last)) / (2.0 * std::numbers::pi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 0.01) {
    throw Error(ErrorKind::near_l, "non-integer index of G");
  }
  return static_cast<int>(rounded);
}

namespace detail {

inline double distance_to_cut(cplx z) {
  const double x = std::clamp(z.real(), -1.0, 1.0);
  return std::abs(z - cplx(x, 0.0));
}

struct ContourCount {
  double turns;
  double min_modulus;
};

// Winding of lambda along a circle (counterclockwise).
inline ContourCount circle_winding(const PlasmaParameters& p, cplx center, double radius, int samples = 128) {
  auto f = [&](double th) { return lambda(center + radius * std::polar(1.0, th), p); };
  const auto tr = numerics::track_argument(f, 0.0, 2.0 * std::numbers::pi, samples);
  return {tr.angle / (2.0 * std::numbers::pi), tr.min_modulus};
}

// Winding of lambda along a stadium at distance delta around [-1, 1].
inline ContourCount cut_winding(const PlasmaParameters& p, double delta) {
  double angle = 0.0;
  double min_mod = std::numeric_limits<double>::infinity();
  auto run = [&](auto&& path, double t0, double t1, int n) {
    const auto tr = numerics::track_argument(path, t0, t1, n);
    angle += tr.angle;
    min_mod = std::min(min_mod, tr.min_modulus);
  };
  const double pi = std::numbers::pi;
  run([&](double x) { return lambda(cplx(x, -delta), p); }, -1.0, 1.0, 256);
  run([&](double th) { return lambda(1.0 + delta * std::polar(1.0, th), p); }, -pi / 2, pi / 2, 32);
  run([&](double x) { return lambda(cplx(-x, delta), p); }, -1.0, 1.0, 256);
  run([&](double th) { return lambda(-1.0 + delta * std::polar(1.0, th), p); }, pi / 2, 3 * pi / 2, 32);
  return {angle / (2.0 * pi), min_mod};
}

}  // namespace detail

/// Root of the two-term Laurent truncation lambda_inf + lambda_2 / z^2 = 0
/// with non-negative real part.
inline cplx laurent_seed(const PlasmaParameters& p) {
  const LaurentHead h = laurent_head_z0(p);
  cplx z = std::sqrt(-h.l2 / h.inf);
  if (z.real() < 0.0) z = -z;
  return z;
}

/// Circle radius that encloses the discrete zeros for contour counting.
inline double default_contour_radius(const PlasmaParameters& p) {
  return std::max(10.0, 4.0 * std::abs(laurent_seed(p)));
}

/// Number of zeros of lambda outside the cut and inside |z| < radius, by the
/// argument principle on the circle minus a thin contour around the cut.
inline int contour_zero_count(const PlasmaParameters& p, double radius = 10.0, double cut_offset = 1e-6) {
  if (!(radius > 1.0 + cut_offset)) {
    throw Error(ErrorKind::validation, "contour radius must exceed 1", "radius");
  }
  const double floor = 1e-10 * std::abs(p.lambda_inf());
  const auto outer = detail::circle_winding(p, 0.0, radius, 256);
  const auto inner = detail::cut_winding(p, cut_offset);
  if (outer.min_modulus < floor || inner.min_modulus < floor) {
    throw Error(ErrorKind::contour, "contour passes too close to a zero of lambda");
  }
  const double raw = outer.turns - inner.turns;
  const double rounded = std::round(raw);
  if (std::abs(raw - rounded) >= 0.01) {
    throw Error(ErrorKind::contour, "non-integer argument-principle count " + std::to_string(raw));
  }
  return static_cast<int>(rounded);
}

/// Number of zeros of lambda inside a disk that does not meet the cut.
inline int count_zeros_in_disk(const PlasmaParameters& p, cplx center, double radius) {
  if (!(radius > 0.0) || detail::distance_to_cut(center) <= radius) {
    throw Error(ErrorKind::validation, "disk must not intersect the cut", "radius");
  }
  const auto w = detail::circle_winding(p, center, radius);
  const double rounded = std::round(w.turns);
  if (std::abs(w.turns - rounded) >= 0.01) throw Error(ErrorKind::contour, "non-integer disk count");
  return static_cast<int>(rounded);
}

// ---------------------------------------------------------------------------
// Curve L

struct LCurvePoint {
  double mu = 0.0;
  double gamma = 0.0;
  double eps = 0.0;
};

struct SkippedPoint {
  double mu;
  std::string reason;
};

struct LCurve {
  std::vector<LCurvePoint> points;
  std::vector<SkippedPoint> skipped;
};

/// Radicands (L1, L2) of the parametrisation gamma = -1 + sqrt(L1), eps = sqrt(L2).
inline std::pair<double, double> l_curve_radicands(double mu) {
  const double lc = case_lambda_cut(mu);
  const double s = 0.5 * std::numbers::pi * mu;
  const double denom = lc * (s * s + (1.0 + lc) * (1.0 + lc));
  const double inner = s * s + lc * (1.0 + lc);
  const double l2 = -3.0 * mu * mu * s * s / denom;
  const double l1 = -3.0 * mu * mu * inner * inner / denom;
  return {l1, l2};
}

inline LCurve l_curve(const std::vector<double>& mu_grid) {
  LCurve out;
  for (const double mu : mu_grid) {
    if (!(mu > 0.0 && mu < 1.0 - kEndpointGuard)) {
      out.skipped.push_back({mu, "outside (0, 1)"});
      continue;
    }
    if (case_lambda_cut(mu) == 0.0) {
      out.skipped.push_back({mu, "lambda_c vanishes"});
      continue;
    }
    const auto [l1, l2] = l_curve_radicands(mu);
    if (!(l1 >= 0.0) || !(l2 > 0.0) || !std::isfinite(l1) || !std::isfinite(l2)) {
      out.skipped.push_back({mu, "negative radicand"});
      continue;
    }
    out.points.push_back({mu, -1.0 + std::sqrt(l1), std::sqrt(l2)});
  }
  return out;
}

/// Root of lambda_c on (0, 1); the curve L exists for mu above it.
inline double case_lambda_root() {
  double lo = 0.5, hi = 0.99;
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    const double mid = 0.5 * (lo + hi);
    (case_lambda_cut(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// mu grid on (lo, hi) with logarithmic clustering toward both ends.
inline std::vector<double> clustered_grid(int n, double lo, double hi, double min_gap = 1e-6) {
  if (n < 2) throw Error(ErrorKind::validation, "grid needs at least two points", "count");
  std::vector<double> out;
  out.reserve(n);
  const double half = 0.5 * (hi - lo);
  const double lmin = std::log(min_gap), lmax = std::log(half);
  const int n_left = n / 2, n_right = n - n_left;
  for (int k = 0; k < n_left; ++k) {
    const double t = n_left == 1 ? 0.0 : static_cast<double>(k) / (n_left - 1);
    out.push_back(lo + std::exp(lmin + t * (lmax - lmin)) * (k + 1 == n_left ? 0.999 : 1.0));
  }
  for (int k = n_right - 1; k >= 0; --k) {
    const double t = n_right == 1 ? 0.0 : static_cast<double>(k) / (n_right - 1);
    out.push_back(hi - std::exp(lmin + t * (lmax - lmin)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Default grid: 400 points on the part of (0, 1) where lambda_c < 0,
/// clustered toward both ends; the lower end is where eps reaches eps_max.
inline std::vector<double> default_l_curve_grid(int n = 400, double eps_max = 10.0) {
  const double root = case_lambda_root();
  double lo = root, hi = 0.999;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double l2 = l_curve_radicands(mid).second;
    (l2 > eps_max * eps_max ? lo : hi) = mid;
  }
  return clustered_grid(n, hi, 1.0 - 2.0 * kEndpointGuard, 1e-7);
}

// ---------------------------------------------------------------------------
// Zero eta0

enum class Region { D_plus, D_minus, near_L, anomalous };

inline std::string_view to_string(Region r) {
  switch (r) {
    case Region::D_plus: return "D_plus";
    case Region::D_minus: return "D_minus";
    case Region::near_L: return "near_L";
    case Region::anomalous: return "anomalous";
  }
  return "unknown";
}

struct SpectrumClassification {
  int kappa = 0;
  int n_zeros = 0;
  std::optional<cplx> eta0;
  Region region = Region::D_minus;
};

/// Exterior of the cut mapped to the unit disk: z = (zeta + 1/zeta) / 2.
inline cplx z_from_zeta(cplx zeta) { return 0.5 * (zeta + 1.0 / zeta); }

inline cplx zeta_from_z(cplx z) {
  cplx w = z + std::sqrt(z - 1.0) * std::sqrt(z + 1.0);
  if (std::abs(w) < 1.0) w = z - std::sqrt(z - 1.0) * std::sqrt(z + 1.0);
  return 1.0 / w;
}

struct ZeroLocation {
  cplx eta0;
  int iterations = 0;
  bool fallback = false;
};

namespace detail {

inline constexpr double kDiskEdge = 1.0 - 1e-9;

inline cplx lambda_zeta(cplx zeta, const PlasmaParameters& p) { return lambda(z_from_zeta(zeta), p); }

inline cplx lambda_zeta_prime(cplx zeta, const PlasmaParameters& p) {
  return lambda_prime(z_from_zeta(zeta), p) * 0.5 * (1.0 - 1.0 / (zeta * zeta));
}

inline bool zeta_admissible(cplx zeta) {
  const double r = std::abs(zeta);
  if (!(r > 1e-12 && r < kDiskEdge)) return false;
  const cplx z = z_from_zeta(zeta);
  return std::abs(z - 1.0) > kEndpointGuard && std::abs(z + 1.0) > kEndpointGuard;
}

inline cplx right_half(cplx z) {
  if (z.real() < 0.0 || (z.real() == 0.0 && z.imag() < 0.0)) return -z;
  return z;
}

// Newton in the disk variable; the exterior of the cut is convex there.
inline numerics::NewtonResult newton_zeta(const PlasmaParameters& p, cplx zeta_seed, double tol) {
  return numerics::complex_newton([&](cplx q) { return lambda_zeta(q, p); },
                                  [&](cplx q) { return lambda_zeta_prime(q, p); }, zeta_seed, tol, 80,
                                  zeta_admissible);
}

// Final polish in z; keeps the best iterate.
inline cplx polish(cplx z, const PlasmaParameters& p) {
  cplx best = z;
  double best_res = std::abs(lambda(z, p));
  for (int i = 0; i < 3; ++i) {
    const cplx next = best - lambda(best, p) / lambda_prime(best, p);
    if (distance_to_cut(next) <= 0.0) break;
    const double res = std::abs(lambda(next, p));
    if (!(res < best_res)) break;
    best = next;
    best_res = res;
  }
  return best;
}

struct PolarCell {
  double r0, r1, th0, th1;
  int depth;
};

inline double cell_turns(const PlasmaParameters& p, const PolarCell& c, double floor) {
  double angle = 0.0;
  double min_mod = std::numeric_limits<double>::infinity();
  auto run = [&](auto&& path, double t0, double t1, int n) {
    const auto tr = numerics::track_argument(path, t0, t1, n, 30);
    angle += tr.angle;
    min_mod = std::min(min_mod, tr.min_modulus);
  };
  auto at = [&](double r, double th) { return lambda_zeta(std::polar(r, th), p); };
  const double r_start = std::max(c.r0, 1e-6);
  run([&](double r) { return at(r, c.th0); }, r_start, c.r1, 16);
  run([&](double th) { return at(c.r1, th); }, c.th0, c.th1, 32);
  run([&](double r) { return at(c.r1 + r_start - r, c.th1); }, r_start, c.r1, 16);
  run([&](double th) { return at(r_start, c.th1 + c.th0 - th); }, c.th0, c.th1, 16);
  if (min_mod < floor) throw Error(ErrorKind::contour, "cell boundary too close to a zero");
  return angle / (2.0 * std::numbers::pi);
}

}  // namespace detail

/// Newton iteration seeded from the Laurent-truncation root.
inline ZeroLocation locate_eta0_newton(const PlasmaParameters& p) {
  const double tol = 1e-12 * std::abs(p.lambda_inf());
  cplx zeta = zeta_from_z(laurent_seed(p));
  if (std::abs(zeta) >= detail::kDiskEdge) zeta *= 0.99;
  const auto r = detail::newton_zeta(p, zeta, tol);
  const cplx eta = detail::right_half(detail::polish(z_from_zeta(r.root), p));
  return {eta, r.iterations, false};
}

/// Subdivision search: polar cells of the disk variable are split until a
/// cell holds a single zero from which Newton converges.
inline ZeroLocation locate_eta0_subdivision(const PlasmaParameters& p) {
  const double tol = 1e-12 * std::abs(p.lambda_inf());
  const double floor = 1e-12 * std::abs(p.lambda_inf());
  const double pi = std::numbers::pi;
  std::vector<detail::PolarCell> stack{{0.0, 1.0 - 1e-6, -pi / 2 - 0.1, pi / 2 + 0.1, 0}};
  int visited = 0;
  while (!stack.empty()) {
    const detail::PolarCell cell = stack.back();
    stack.pop_back();
    if (++visited > 4000) break;
    double turns = 0.0;
    try {
      turns = detail::cell_turns(p, cell, floor);
    } catch (const Error&) {
      turns = 1.0;  // unresolved boundary: keep splitting
    }
    const long count = std::lround(turns);
    if (count <= 0) continue;
    if (count == 1) {
      const double rm = 0.5 * (cell.r0 + cell.r1), tm = 0.5 * (cell.th0 + cell.th1);
      try {
        const auto r = detail::newton_zeta(p, std::polar(std::max(rm, 1e-3), tm), tol);
        const cplx eta = detail::polish(z_from_zeta(r.root), p);
        if (std::abs(lambda(eta, p)) <= 1e-10 * std::abs(p.lambda_inf())) {
          return {detail::right_half(eta), r.iterations, true};
        }
      } catch (const Error&) {
      }
    }
    if (cell.depth >= 24) continue;
    const double rm = cell.r0 + 0.47 * (cell.r1 - cell.r0);
    const double tm = cell.th0 + 0.53 * (cell.th1 - cell.th0);
    const int d = cell.depth + 1;
    stack.push_back({cell.r0, rm, cell.th0, tm, d});
    stack.push_back({cell.r0, rm, tm, cell.th1, d});
    stack.push_back({rm, cell.r1, cell.th0, tm, d});
    stack.push_back({rm, cell.r1, tm, cell.th1, d});
  }
  throw Error(ErrorKind::no_convergence, "no zero of lambda found off the cut (parameters not in D+?)");
}

/// Radius of the verification disk around eta0: clear of the cut and of -eta0.
inline double eta0_check_radius(cplx eta0) {
  return 0.25 * std::min(detail::distance_to_cut(eta0), 2.0 * std::abs(eta0));
}

/// Plasma-mode zero eta0 with Re eta0 > 0, confirmed by a small-circle count.
inline ZeroLocation find_eta0_detailed(const PlasmaParameters& p) {
  ZeroLocation loc;
  bool ok = false;
  try {
    loc = locate_eta0_newton(p);
    ok = std::abs(lambda(loc.eta0, p)) <= 1e-10 * std::abs(p.lambda_inf());
  } catch (const Error&) {
    ok = false;
  }
  if (!ok) loc = locate_eta0_subdivision(p);
  if (count_zeros_in_disk(p, loc.eta0, eta0_check_radius(loc.eta0)) != 1) {
    throw Error(ErrorKind::degenerate, "zero eta0 is not isolated and simple");
  }
  return loc;
}

inline cplx find_eta0(const PlasmaParameters& p) { return find_eta0_detailed(p).eta0; }

/// kappa, the zero count and eta0 when present.
inline SpectrumClassification classify(const PlasmaParameters& p, const SpectrumOptions& opt = {}) {
  SpectrumClassification s;
  s.kappa = winding_index(p, opt);
  s.n_zeros = 2 * s.kappa;
  if (s.kappa == 0) {
    s.region = Region::D_minus;
  } else if (s.kappa == 1) {
    s.region = Region::D_plus;
    s.eta0 = find_eta0(p);
  } else {
    s.region = Region::anomalous;
  }
  return s;
}

}  // namespace halfspace
