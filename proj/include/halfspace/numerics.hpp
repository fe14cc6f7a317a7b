#pragma once

// Shared numerical kernels: adaptive Gauss-Kronrod quadrature, principal-value
// quadrature by singularity subtraction, damped complex Newton iteration and
// continuous argument tracking for winding numbers.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "halfspace/error.hpp"

namespace halfspace {

using cplx = std::complex<double>;

namespace numerics {

/// Neumaier-compensated accumulator; works for double and std::complex<double>.
template <class T>
class CompensatedSum {
 public:
  void add(T x) {
    if constexpr (std::is_same_v<T, cplx>) {
      re_.add(x.real());
      im_.add(x.imag());
    } else {
      const T t = sum_ + x;
      if (std::abs(sum_) >= std::abs(x)) {
        comp_ += (sum_ - t) + x;
      } else {
        comp_ += (x - t) + sum_;
      }
      sum_ = t;
    }
  }
  T value() const {
    if constexpr (std::is_same_v<T, cplx>) {
      return {re_.value(), im_.value()};
    } else {
      return sum_ + comp_;
    }
  }

 private:
  struct Empty {};
  using Part = std::conditional_t<std::is_same_v<T, cplx>, CompensatedSum<double>, Empty>;
  T sum_{};
  T comp_{};
  [[no_unique_address]] Part re_{};
  [[no_unique_address]] Part im_{};
};

enum class EndpointMode {
  plain,           // integrand smooth up to the endpoints
  log_refined,     // logarithmic endpoint behaviour; smoothing substitution applied
  pv_subtraction,  // simple pole inside the interval; only valid through pv_integrate
};

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int max_depth = 30;
  EndpointMode endpoint_mode = EndpointMode::plain;

  void validate() const {
    if (!(rel_tol > 0.0) || !std::isfinite(rel_tol)) {
      throw Error(ErrorKind::validation, "rel_tol must be positive", "rel_tol");
    }
    if (!(abs_tol > 0.0) || !std::isfinite(abs_tol)) {
      throw Error(ErrorKind::validation, "abs_tol must be positive", "abs_tol");
    }
    if (max_depth < 1) {
      throw Error(ErrorKind::validation, "max_depth must be at least 1", "max_depth");
    }
  }

  QuadratureSpec with_mode(EndpointMode mode) const {
    QuadratureSpec s = *this;
    s.endpoint_mode = mode;
    return s;
  }
};

struct QuadratureResult {
  cplx value;
  double error = 0.0;
  int intervals = 0;
  bool converged = true;
};

/// Raised when the refinement budget is exhausted; carries the best estimate.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& message, cplx estimate, double error_bound)
      : Error(ErrorKind::no_convergence, message), estimate_(estimate), error_bound_(error_bound) {}
  cplx estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  cplx estimate_;
  double error_bound_;
};

using ComplexFn = std::function<cplx(double)>;

namespace detail {

// 15-point Kronrod abscissae and weights with the embedded 7-point Gauss rule.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  cplx value;
  double error;
  int depth;
};

template <class F>
Segment gk15(F&& f, double a, double b, int depth) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<cplx, 15> fv;
  fv[7] = f(center);
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv[j] = f(center - dx);
    fv[14 - j] = f(center + dx);
  }
  cplx kronrod = fv[7] * kWgk[7];
  cplx gauss = fv[7] * kWg[3];
  double resabs = std::abs(fv[7]) * kWgk[7];
  for (std::size_t j = 0; j < 7; ++j) {
    const cplx pair = fv[j] + fv[14 - j];
    kronrod += kWgk[j] * pair;
    resabs += kWgk[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  const cplx mean = 0.5 * kronrod;
  double resasc = kWgk[7] * std::abs(fv[7] - mean);
  for (std::size_t j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));
  }
  kronrod *= half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((kronrod - gauss * half));
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * resabs, err);
  }
  if (!std::isfinite(std::abs(kronrod))) {
    throw Error(ErrorKind::no_convergence, "non-finite integrand value in quadrature");
  }
  return {a, b, kronrod, err, depth};
}

struct SegmentOrder {
  bool operator()(const Segment& x, const Segment& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.a > y.a;
  }
};

template <class F>
QuadratureResult adaptive(F&& f, double a, double b, const QuadratureSpec& spec) {
  constexpr int kMaxSegments = 20000;
  std::priority_queue<Segment, std::vector<Segment>, SegmentOrder> open;
  std::vector<Segment> done;
  Segment first = gk15(f, a, b, 0);
  cplx total = first.value;
  double total_err = first.error;
  open.push(first);
  int count = 1;
  auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
  while (!open.empty() && total_err > tolerance()) {
    Segment s = open.top();
    open.pop();
    if (s.depth >= spec.max_depth || count >= kMaxSegments) {
      done.push_back(s);
      continue;
    }
    const double mid = 0.5 * (s.a + s.b);
    Segment left = gk15(f, s.a, mid, s.depth + 1);
    Segment right = gk15(f, mid, s.b, s.depth + 1);
    total += left.value + right.value - s.value;
    total_err += left.error + right.error - s.error;
    open.push(left);
    open.push(right);
    ++count;
  }
  while (!open.empty()) {
    done.push_back(open.top());
    open.pop();
  }
  std::sort(done.begin(), done.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
  CompensatedSum<cplx> sum;
  CompensatedSum<double> err;
  for (const auto& s : done) {
    sum.add(s.value);
    err.add(s.error);
  }
  QuadratureResult r;
  r.value = sum.value();
  r.error = err.value();
  r.intervals = static_cast<int>(done.size());
  r.converged = r.error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(r.value));
  return r;
}

}  // namespace detail

/// Adaptive quadrature of a complex-valued integrand on [a, b]; reports
/// convergence instead of throwing.
template <class F>
QuadratureResult integrate_detailed(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  spec.validate();
  if (!(a < b)) {
    if (a == b) return {};
    throw Error(ErrorKind::validation, "integration interval must satisfy a < b");
  }
  switch (spec.endpoint_mode) {
    case EndpointMode::plain:
      return detail::adaptive(f, a, b, spec);
    case EndpointMode::log_refined: {
      // x = a + (b - a) u^2 (3 - 2u) flattens x^k log(x) endpoint behaviour.
      const double len = b - a;
      auto g = [&](double u) -> cplx {
        const double x = a + len * u * u * (3.0 - 2.0 * u);
        const double jac = 6.0 * len * u * (1.0 - u);
        if (jac == 0.0) return 0.0;
        return f(std::clamp(x, a, b)) * jac;
      };
      return detail::adaptive(g, 0.0, 1.0, spec);
    }
    case EndpointMode::pv_subtraction:
      break;
  }
  throw Error(ErrorKind::validation, "pv_subtraction requires a pole; use pv_integrate");
}

/// Adaptive quadrature; throws QuadratureError when tolerances are not met.
template <class F>
cplx integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  const QuadratureResult r = integrate_detailed(std::forward<F>(f), a, b, spec);
  if (!r.converged) {
    throw QuadratureError("quadrature depth exceeded (error " + std::to_string(r.error) + ")",
                          r.value, r.error);
  }
  return r.value;
}

/// Cauchy principal value of the integral of f(t) / (t - pole) over [a, b]:
///   int [f(t) - f(pole)] / (t - pole) dt + f(pole) ln((b - pole) / (pole - a)).
/// The smooth remainder is integrated on [a, pole] and [pole, b] separately.
template <class F>
cplx pv_integrate(F&& f, double a, double b, double pole, const QuadratureSpec& spec = {}) {
  const double margin = 1e-14 * std::max(1.0, std::abs(b - a));
  if (!(pole > a + margin && pole < b - margin)) {
    throw Error(ErrorKind::endpoint, "principal-value pole must lie strictly inside the interval");
  }
  const cplx fp = f(pole);
  auto remainder = [&](double t) -> cplx {
    const double d = t - pole;
    if (d == 0.0) return 0.0;
    return (f(t) - fp) / d;
  };
  QuadratureSpec piece = spec;
  if (piece.endpoint_mode == EndpointMode::pv_subtraction) piece.endpoint_mode = EndpointMode::log_refined;
  const cplx left = integrate(remainder, a, pole, piece);
  const cplx right = integrate(remainder, pole, b, piece);
  return left + right + fp * std::log((b - pole) / (pole - a));
}

struct NewtonResult {
  cplx root;
  int iterations = 0;
  double residual = 0.0;
};

/// Damped complex Newton iteration. The step is halved while it increases
/// |f| or leaves the admissible set (when one is given).
template <class F, class DF>
NewtonResult complex_newton(F&& f, DF&& df, cplx seed, double tol, int max_iter,
                            const std::function<bool(cplx)>& admissible = {}) {
  cplx z = seed;
  cplx fz = f(z);
  for (int it = 0; it <= max_iter; ++it) {
    if (std::abs(fz) <= tol) return {z, it, std::abs(fz)};
    if (it == max_iter) break;
    const cplx d = df(z);
    if (!(std::abs(d) > std::numeric_limits<double>::min() * 1e10) || !std::isfinite(std::abs(d))) {
      throw Error(ErrorKind::degenerate, "Newton derivative underflow");
    }
    cplx step = fz / d;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      const cplx trial = z - step;
      if (!admissible || admissible(trial)) {
        const cplx ft = f(trial);
        if (std::isfinite(std::abs(ft)) && (std::abs(ft) < std::abs(fz) || halving >= 40)) {
          z = trial;
          fz = ft;
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  throw Error(ErrorKind::no_convergence, "Newton iteration did not converge");
}

/// Result of unwrapping the argument along an ordered list of values.
struct WindingResult {
  std::optional<long> winding;            // set when the path is well resolved
  std::optional<std::size_t> refine_after;  // jump >= pi/2 between [i] and [i+1]
  double turns = 0.0;                     // raw accumulated angle / 2 pi
};

/// Winding number of a sampled path about the origin. Closed paths are
/// expected (first and last values equal up to sampling).
inline WindingResult winding_number(std::span<const cplx> path) {
  WindingResult r;
  if (path.empty()) {
    r.winding = 0;
    return r;
  }
  for (const cplx& v : path) {
    if (v == cplx(0.0, 0.0)) throw Error(ErrorKind::contour, "path passes through zero");
  }
  CompensatedSum<double> angle;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double d = std::arg(path[i + 1] / path[i]);
    if (std::abs(d) >= std::numbers::pi / 2) {
      r.refine_after = i;
      return r;
    }
    angle.add(d);
  }
  r.turns = angle.value() / (2.0 * std::numbers::pi);
  const double rounded = std::round(r.turns);
  if (std::abs(r.turns - rounded) > 1e-6) {
    throw Error(ErrorKind::contour, "path is not closed: non-integer winding");
  }
  r.winding = static_cast<long>(rounded);
  return r;
}

struct ArgumentTrack {
  double angle = 0.0;                                     // total continuous change of arg
  double min_modulus = std::numeric_limits<double>::infinity();
  double max_modulus = 0.0;
  cplx first;
  cplx last;
  std::size_t evaluations = 0;
};

/// Continuous argument of f(t) along [t0, t1]: sample on a uniform grid and
/// bisect every step whose argument jump reaches pi/2.
template <class F>
ArgumentTrack track_argument(F&& f, double t0, double t1, int initial_samples = 64, int max_depth = 40) {
  ArgumentTrack tr;
  CompensatedSum<double> angle;
  auto note = [&](cplx v) {
    ++tr.evaluations;
    const double m = std::abs(v);
    if (!std::isfinite(m)) throw Error(ErrorKind::contour, "non-finite value on tracked path");
    tr.min_modulus = std::min(tr.min_modulus, m);
    tr.max_modulus = std::max(tr.max_modulus, m);
    if (m == 0.0) throw Error(ErrorKind::contour, "tracked path passes through zero");
  };
  struct Frame {
    double ta, tb;
    cplx va, vb;
    int depth;
  };
  const int n = std::max(2, initial_samples);
  cplx prev = f(t0);
  note(prev);
  tr.first = prev;
  std::vector<Frame> stack;
  for (int k = 1; k <= n; ++k) {
    const double tk = (k == n) ? t1 : t0 + (t1 - t0) * static_cast<double>(k) / n;
    const double tprev = t0 + (t1 - t0) * static_cast<double>(k - 1) / n;
    const cplx vk = f(tk);
    note(vk);
    stack.push_back({tprev, tk, prev, vk, 0});
    while (!stack.empty()) {
      Frame fr = stack.back();
      stack.pop_back();
      const double d = std::arg(fr.vb / fr.va);
      if (std::abs(d) < std::numbers::pi / 2) {
        angle.add(d);
        continue;
      }
      if (fr.depth >= max_depth) {
        throw Error(ErrorKind::no_convergence, "argument tracking exceeded refinement budget");
      }
      const double tm = 0.5 * (fr.ta + fr.tb);
      const cplx vm = f(tm);
      note(vm);
      // Right half first so the left half is processed next (ordered traversal).
      stack.push_back({tm, fr.tb, vm, fr.vb, fr.depth + 1});
      stack.push_back({fr.ta, tm, fr.va, vm, fr.depth + 1});
    }
    prev = vk;
  }
  tr.last = prev;
  tr.angle = angle.value();
  return tr;
}

/// Gauss-Legendre nodes and weights on [-1, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::validation, "Gauss-Legendre order must be positive");
  std::vector<double> x(n), w(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return {x, w};
}

}  // namespace numerics
}  // namespace halfspace
