#pragma once

// Command-line front end: solve, profile, boundary, mode-map, l-curve and
// verify, with CSV/JSON emission and a fail-closed JSON config file.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "halfspace/coefficients.hpp"
#include "halfspace/dispersion.hpp"
#include "halfspace/reconstruction.hpp"
#include "halfspace/self_check.hpp"
#include "halfspace/spectrum.hpp"

namespace halfspace::cli {

inline constexpr const char* kVersion = "1.0.0";

using json = nlohmann::ordered_json;

enum class Format { csv, json };

struct Range {
  double start = 0.0;
  double stop = 0.0;
  int count = 2;

  std::vector<double> values() const {
    std::vector<double> v(count);
    for (int k = 0; k < count; ++k) v[k] = k + 1 == count ? stop : start + (stop - start) * k / (count - 1);
    return v;
  }
};

struct RunConfig {
  double gamma = 0.0;
  double eps = 0.1;
  double alpha_p = 1.0;
  cplx e0{1.0, 0.0};

  double x_min = 1e-3;
  double x_max = 40.0;
  int x_count = 400;
  int mu_count = 400;  // per half-interval
  Range gamma_range{-0.99, 3.0, 50};
  Range eps_range{0.05, 3.0, 50};
  int l_count = 400;
  double l_eps_max = 10.0;
  std::optional<Range> l_mu_range;
  std::optional<double> time;  // multiplies exp(-i omega_1 t) into profiles

  std::optional<Format> format;
  std::string out;
  int precision = 12;
  int threads = 0;
  numerics::QuadratureSpec tolerances = default_coefficient_quadrature();

  PlasmaParameters params() const { return PlasmaParameters::make(gamma, eps, alpha_p, e0); }
};

// ---------------------------------------------------------------------------
// Parsing helpers

inline double parse_real(const std::string& s, const std::string& field) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw Error(ErrorKind::validation, "not a finite number: '" + s + "'", field);
  }
  return v;
}

inline int parse_count(const std::string& s, const std::string& field) {
  const double v = parse_real(s, field);
  if (v != std::floor(v) || v < 2 || v > 1e7) throw Error(ErrorKind::validation, "count must be an integer >= 2", field);
  return static_cast<int>(v);
}

/// "re,im" or a bare real.
inline cplx parse_complex(const std::string& s, const std::string& field) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) return {parse_real(s, field), 0.0};
  return {parse_real(s.substr(0, comma), field), parse_real(s.substr(comma + 1), field)};
}

/// "start:stop:count".
inline Range parse_range(const std::string& s, const std::string& field) {
  const auto a = s.find(':');
  const auto b = a == std::string::npos ? std::string::npos : s.find(':', a + 1);
  if (b == std::string::npos) throw Error(ErrorKind::validation, "range must be start:stop:count", field);
  return {parse_real(s.substr(0, a), field), parse_real(s.substr(a + 1, b - a - 1), field),
          parse_count(s.substr(b + 1), field)};
}

inline Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw Error(ErrorKind::validation, "format must be csv or json", "format");
}

// ---------------------------------------------------------------------------
// Config file

namespace detail {

template <class F>
void for_keys(const json& obj, const std::string& section, std::initializer_list<const char*> allowed, F&& apply) {
  if (!obj.is_object()) throw Error(ErrorKind::validation, "config section must be an object", section);
  for (const auto& [key, value] : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; });
    const std::string path = section.empty() ? key : section + "." + key;
    if (!known) throw Error(ErrorKind::validation, "unknown config key", path);
    apply(key, value, path);
  }
}

inline double json_real(const json& v, const std::string& path) {
  if (!v.is_number()) throw Error(ErrorKind::validation, "expected a number", path);
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw Error(ErrorKind::validation, "expected a finite number", path);
  return d;
}

inline int json_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw Error(ErrorKind::validation, "expected an integer", path);
  return v.get<int>();
}

inline std::string json_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw Error(ErrorKind::validation, "expected a string", path);
  return v.get<std::string>();
}

inline cplx json_complex(const json& v, const std::string& path) {
  if (v.is_number()) return {json_real(v, path), 0.0};
  if (v.is_string()) return parse_complex(v.get<std::string>(), path);
  cplx z;
  for_keys(v, path, {"re", "im"}, [&](const std::string& k, const json& x, const std::string& p) {
    if (k == "re") z.real(json_real(x, p));
    if (k == "im") z.imag(json_real(x, p));
  });
  return z;
}

inline Range json_range(const json& v, const std::string& path) {
  if (v.is_string()) return parse_range(v.get<std::string>(), path);
  Range r;
  for_keys(v, path, {"start", "stop", "count"}, [&](const std::string& k, const json& x, const std::string& p) {
    if (k == "start") r.start = json_real(x, p);
    if (k == "stop") r.stop = json_real(x, p);
    if (k == "count") r.count = json_int(x, p);
  });
  return r;
}

}  // namespace detail

/// Applies a JSON config document; unknown keys are an error.
inline void apply_config(const json& doc, RunConfig& cfg) {
  using detail::for_keys;
  for_keys(doc, "", {"params", "grids", "output", "tolerances", "threads"},
           [&](const std::string& key, const json& v, const std::string& path) {
             if (key == "threads") {
               cfg.threads = detail::json_int(v, path);
             } else if (key == "params") {
               for_keys(v, path, {"gamma", "eps", "alpha_p", "e0"}, [&](const std::string& k, const json& x, const std::string& p) {
                 if (k == "gamma") cfg.gamma = detail::json_real(x, p);
                 if (k == "eps") cfg.eps = detail::json_real(x, p);
                 if (k == "alpha_p") cfg.alpha_p = detail::json_real(x, p);
                 if (k == "e0") cfg.e0 = detail::json_complex(x, p);
               });
             } else if (key == "grids") {
               for_keys(v, path,
                        {"x_min", "x_max", "x_count", "mu_count", "gamma_range", "eps_range", "l_count", "l_eps_max",
                         "l_mu_range", "time"},
                        [&](const std::string& k, const json& x, const std::string& p) {
                          if (k == "x_min") cfg.x_min = detail::json_real(x, p);
                          if (k == "x_max") cfg.x_max = detail::json_real(x, p);
                          if (k == "x_count") cfg.x_count = detail::json_int(x, p);
                          if (k == "mu_count") cfg.mu_count = detail::json_int(x, p);
                          if (k == "gamma_range") cfg.gamma_range = detail::json_range(x, p);
                          if (k == "eps_range") cfg.eps_range = detail::json_range(x, p);
                          if (k == "l_count") cfg.l_count = detail::json_int(x, p);
                          if (k == "l_eps_max") cfg.l_eps_max = detail::json_real(x, p);
                          if (k == "l_mu_range") cfg.l_mu_range = detail::json_range(x, p);
                          if (k == "time") cfg.time = detail::json_real(x, p);
                        });
             } else if (key == "output") {
               for_keys(v, path, {"format", "path", "precision"}, [&](const std::string& k, const json& x, const std::string& p) {
                 if (k == "format") cfg.format = parse_format(detail::json_string(x, p));
                 if (k == "path") cfg.out = detail::json_string(x, p);
                 if (k == "precision") cfg.precision = detail::json_int(x, p);
               });
             } else if (key == "tolerances") {
               for_keys(v, path, {"rel_tol", "abs_tol", "max_depth"}, [&](const std::string& k, const json& x, const std::string& p) {
                 if (k == "rel_tol") cfg.tolerances.rel_tol = detail::json_real(x, p);
                 if (k == "abs_tol") cfg.tolerances.abs_tol = detail::json_real(x, p);
                 if (k == "max_depth") cfg.tolerances.max_depth = detail::json_int(x, p);
               });
             }
           });
}

inline void load_config(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::validation, "cannot open config file '" + path + "'", "config");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::validation, std::string("config is not valid JSON: ") + e.what(), "config");
  }
  apply_config(doc, cfg);
}

inline void validate(const RunConfig& cfg) {
  cfg.params();
  cfg.tolerances.validate();
  if (cfg.precision < 1 || cfg.precision > 17) throw Error(ErrorKind::validation, "precision must be 1..17", "precision");
  if (cfg.threads < 0) throw Error(ErrorKind::validation, "threads must be >= 0", "threads");
  if (cfg.x_count < 2) throw Error(ErrorKind::validation, "count must be >= 2", "x_count");
  if (cfg.mu_count < 2) throw Error(ErrorKind::validation, "count must be >= 2", "mu_count");
  if (cfg.l_count < 2) throw Error(ErrorKind::validation, "count must be >= 2", "l_count");
  if (!(cfg.x_min > 0.0 && cfg.x_max > cfg.x_min)) throw Error(ErrorKind::validation, "need 0 < x_min < x_max", "x_max");
  for (const auto& [r, name] : {std::pair{cfg.gamma_range, "gamma_range"}, std::pair{cfg.eps_range, "eps_range"}}) {
    if (r.count < 2) throw Error(ErrorKind::validation, "count must be >= 2", name);
  }
  if (cfg.eps_range.start <= 0.0 || cfg.eps_range.stop <= 0.0) throw Error(ErrorKind::validation, "eps must be > 0", "eps_range");
  if (cfg.gamma_range.start < -1.0 || cfg.gamma_range.stop < -1.0) throw Error(ErrorKind::validation, "gamma must be >= -1", "gamma_range");
  if (cfg.l_mu_range) {
    const Range& r = *cfg.l_mu_range;
    if (r.count < 2 || !(r.start > 0.0 && r.start < 1.0 && r.stop > 0.0 && r.stop < 1.0)) {
      throw Error(ErrorKind::validation, "mu range must lie strictly inside (0, 1)", "l_mu_range");
    }
  }
  if (cfg.time && !std::isfinite(*cfg.time)) throw Error(ErrorKind::validation, "time must be finite", "time");
}

// ---------------------------------------------------------------------------
// Serialization

/// Scientific notation with `precision` digits after the point.
inline std::string sci(double v, int precision) {
  if (v == 0.0) v = 0.0;  // no negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", precision, v);
  return buf;
}

/// JSON number rounded to the configured precision (round-trips exactly).
inline json num(double v, int precision) {
  if (!std::isfinite(v)) return nullptr;
  const double r = std::strtod(sci(v, precision).c_str(), nullptr);
  return r == 0.0 ? 0.0 : r;
}

inline json cnum(cplx z, int precision) { return json{{"re", num(z.real(), precision)}, {"im", num(z.imag(), precision)}}; }

class CsvWriter {
 public:
  CsvWriter(std::vector<std::string> header, int precision) : precision_(precision) { row_strings(header); }
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << quote(cells[i]);
    }
    out_ << '\n';
  }
  std::string cell(double v) const { return sci(v, precision_); }
  std::string str() const { return out_.str(); }

 private:
  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (const char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  std::ostringstream out_;
  int precision_;
};

inline json header(const std::string& command) { return json{{"version", kVersion}, {"command", command}}; }

inline json params_json(const PlasmaParameters& p, int prec) {
  return json{{"gamma", num(p.gamma, prec)},
              {"eps", num(p.eps, prec)},
              {"alpha_p", num(p.alpha_p, prec)},
              {"e0", cnum(p.e0, prec)}};
}

inline json error_json(const Error& e) {
  json err{{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
  if (!e.field().empty()) err["field"] = e.field();
  if (const auto* r = dynamic_cast<const ResidualError*>(&e)) {
    json res = json::object();
    for (const auto& [name, value] : r->residuals()) res[name] = value;
    err["residuals"] = res;
  }
  return json{{"version", kVersion}, {"error", err}};
}

// ---------------------------------------------------------------------------
// Logging (verbosity from HALFSPACE_LOG only)

inline bool log_enabled() {
  const char* v = std::getenv("HALFSPACE_LOG");
  return v != nullptr && std::string(v) != "" && std::string(v) != "0" && std::string(v) != "quiet";
}

class PhaseTimer {
 public:
  explicit PhaseTimer(std::ostream& err) : err_(err), start_(std::chrono::steady_clock::now()) {}
  void mark(const char* phase) {
    if (!log_enabled()) return;
    const auto now = std::chrono::steady_clock::now();
    err_ << "[halfspace] " << phase << ": " << std::chrono::duration<double, std::milli>(now - start_).count() << " ms\n";
    start_ = now;
  }

 private:
  std::ostream& err_;
  std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------
// Commands. Each returns the exit status and fills `out`.

struct CommandResult {
  int status = 0;
  std::string body;
  std::optional<json> error;  // machine-readable, for the error stream
};

inline SolveOptions solve_options(const RunConfig& cfg) {
  SolveOptions o;
  o.quadrature = cfg.tolerances;
  return o;
}

inline cplx time_factor(const RunConfig& cfg, const PlasmaParameters& p) {
  if (!cfg.time) return 1.0;
  const double omega1 = (1.0 + p.gamma) / p.eps;
  return std::exp(cplx(0.0, -omega1 * *cfg.time));
}

inline CommandResult cmd_solve(const RunConfig& cfg, std::ostream& err) {
  PhaseTimer timer(err);
  const PlasmaParameters p = cfg.params();
  const int prec = cfg.precision;
  const Verification v = verify_all(p, solve_options(cfg));
  timer.mark("solve");
  const Solution& s = v.solution;
  const CoefficientSet& cs = s.coeffs;
  const bool ok = v.residuals.passed();

  CommandResult r;
  r.status = ok ? 0 : 1;
  if (!ok) {
    json e{{"version", kVersion},
           {"error", {{"kind", "residual"}, {"message", "residual above tolerance"}}}};
    for (const auto& [name, value] : v.residuals.named()) e["error"]["residuals"][name] = value;
    r.error = e;
  }
  const auto fmt = cfg.format.value_or(Format::json);
  if (fmt == Format::json) {
    json j = header("solve");
    j["parameters"] = params_json(p, prec);
    j["classification"] = {{"kappa", s.spectrum.kappa},
                           {"n_zeros", s.spectrum.n_zeros},
                           {"region", std::string(to_string(s.spectrum.region))},
                           {"eta0", s.spectrum.eta0 ? cnum(*s.spectrum.eta0, prec) : json(nullptr)}};
    j["coefficients"] = {{"e_infty", cnum(cs.e_infty, prec)}, {"e_debye", cnum(cs.e_debye, prec)},
                         {"a1", cnum(cs.a1, prec)},           {"z0a1", cnum(cs.z0a1, prec)},
                         {"a0", cnum(cs.a0, prec)},           {"c1", cnum(cs.c1, prec)}};
    j["flux"] = {{"p_i", cnum(v.flux.p_i, prec)},
                 {"p_r", cnum(v.flux.p_r, prec)},
                 {"p_s", cnum(v.flux.p_s, prec)},
                 {"a_s", cnum(v.flux.a_s_wall, prec)},
                 {"alpha_measured", cnum(v.flux.alpha_measured, prec)},
                 {"flux_identity", cnum(v.flux.flux_identity, prec)}};
    json res = json::object();
    for (const auto& [name, value] : v.residuals.named()) res[name] = num(value, prec);
    j["residuals"] = res;
    j["status"] = ok ? "ok" : "residual_failure";
    r.body = j.dump(2) + "\n";
  } else {
    CsvWriter w({"name", "re", "im"}, prec);
    auto put = [&](const std::string& n, cplx z) { w.row_strings({n, w.cell(z.real()), w.cell(z.imag())}); };
    put("kappa", static_cast<double>(s.spectrum.kappa));
    if (s.spectrum.eta0) put("eta0", *s.spectrum.eta0);
    put("e_infty", cs.e_infty);
    put("e_debye", cs.e_debye);
    put("a1", cs.a1);
    put("z0a1", cs.z0a1);
    put("a0", cs.a0);
    put("c1", cs.c1);
    put("alpha_measured", v.flux.alpha_measured);
    for (const auto& [name, value] : v.residuals.named()) put(name, value);
    r.body = w.str();
  }
  return r;
}

inline CommandResult cmd_profile(const RunConfig& cfg, std::ostream& err) {
  PhaseTimer timer(err);
  const PlasmaParameters p = cfg.params();
  const Solution s = solve_all(p, solve_options(cfg));
  timer.mark("solve");
  const FieldProfile fp = field_profile(s, geometric_grid(cfg.x_count, cfg.x_max, cfg.x_min), cfg.tolerances);
  timer.mark("profile");
  const cplx tf = time_factor(cfg, p);
  CommandResult r;
  if (cfg.format.value_or(Format::csv) == Format::csv) {
    CsvWriter w({"x", "re_e", "im_e", "abs_e"}, cfg.precision);
    for (std::size_t i = 0; i < fp.x_grid.size(); ++i) {
      const cplx e = fp.e_values[i] * tf;
      w.row_strings({w.cell(fp.x_grid[i]), w.cell(e.real()), w.cell(e.imag()), w.cell(std::abs(e))});
    }
    r.body = w.str();
  } else {
    json j = header("profile");
    j["parameters"] = params_json(p, cfg.precision);
    j["e_infty"] = cnum(fp.e_infty * tf, cfg.precision);
    json rows = json::array();
    for (std::size_t i = 0; i < fp.x_grid.size(); ++i) {
      rows.push_back({{"x", num(fp.x_grid[i], cfg.precision)}, {"e", cnum(fp.e_values[i] * tf, cfg.precision)}});
    }
    j["profile"] = rows;
    r.body = j.dump(2) + "\n";
  }
  return r;
}

inline CommandResult cmd_boundary(const RunConfig& cfg, std::ostream& err) {
  PhaseTimer timer(err);
  const PlasmaParameters p = cfg.params();
  const Solution s = solve_all(p, solve_options(cfg));
  timer.mark("solve");
  auto [mu, w] = default_mu_grid(cfg.mu_count);
  const BoundaryDistribution bd = boundary_distribution(s, mu, w, cfg.tolerances);
  timer.mark("boundary");
  const cplx tf = time_factor(cfg, p);
  CommandResult r;
  if (cfg.format.value_or(Format::csv) == Format::csv) {
    CsvWriter cw({"mu", "re_h", "im_h", "abs_h"}, cfg.precision);
    for (std::size_t i = 0; i < bd.mu_grid.size(); ++i) {
      const cplx h = bd.h_values[i] * tf;
      cw.row_strings({cw.cell(bd.mu_grid[i]), cw.cell(h.real()), cw.cell(h.imag()), cw.cell(std::abs(h))});
    }
    r.body = cw.str();
  } else {
    const FluxReport f = measure_accommodation(bd, s.coeffs);
    json j = header("boundary");
    j["parameters"] = params_json(p, cfg.precision);
    json rows = json::array();
    for (std::size_t i = 0; i < bd.mu_grid.size(); ++i) {
      rows.push_back({{"mu", num(bd.mu_grid[i], cfg.precision)},
                      {"weight", num(bd.weights[i], cfg.precision)},
                      {"h", cnum(bd.h_values[i] * tf, cfg.precision)}});
    }
    j["distribution"] = rows;
    j["flux"] = {{"p_i", cnum(f.p_i, cfg.precision)},
                 {"p_r", cnum(f.p_r, cfg.precision)},
                 {"p_s", cnum(f.p_s, cfg.precision)},
                 {"a_s", cnum(f.a_s_wall, cfg.precision)},
                 {"alpha_measured", cnum(f.alpha_measured, cfg.precision)}};
    r.body = j.dump(2) + "\n";
  }
  return r;
}

struct ModeCell {
  double gamma = 0.0;
  double eps = 0.0;
  std::optional<int> kappa;
  std::string region;
  std::string message;
};

inline ModeCell mode_cell(double gamma, double eps) {
  ModeCell c{gamma, eps, std::nullopt, "", ""};
  try {
    const int k = winding_index(PlasmaParameters::make(gamma, eps));
    c.kappa = k;
    c.region = k == 0 ? "D_minus" : k == 1 ? "D_plus" : "anomalous";
  } catch (const Error& e) {
    c.region = e.kind() == ErrorKind::near_l ? "near_L" : "error";
    c.message = e.what();
  }
  return c;
}

/// Row-major sweep (gamma outer); results are stored by grid index so the
/// output never depends on thread scheduling.
inline std::vector<ModeCell> mode_map(const Range& gamma, const Range& eps, int threads) {
  const auto gv = gamma.values();
  const auto ev = eps.values();
  const std::size_t n = gv.size() * ev.size();
  std::vector<ModeCell> cells(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) cells[i] = mode_cell(gv[i / ev.size()], ev[i % ev.size()]);
  };
  unsigned t = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
  t = static_cast<unsigned>(std::min<std::size_t>(t, n));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < t; ++k) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  return cells;
}

inline CommandResult cmd_mode_map(const RunConfig& cfg, std::ostream& err) {
  PhaseTimer timer(err);
  const auto cells = mode_map(cfg.gamma_range, cfg.eps_range, cfg.threads);
  timer.mark("mode-map");
  std::size_t computed = 0;
  for (const auto& c : cells) computed += c.region != "error";
  CommandResult r;
  r.status = computed * 100 >= cells.size() * 99 ? 0 : 2;
  if (r.status != 0) {
    r.error = json{{"version", kVersion},
                   {"error", {{"kind", "no_convergence"}, {"message", "fewer than 99% of cells computed"},
                              {"computed", computed}, {"total", cells.size()}}}};
  }
  if (cfg.format.value_or(Format::csv) == Format::csv) {
    CsvWriter w({"gamma", "eps", "kappa", "region"}, cfg.precision);
    for (const auto& c : cells) {
      w.row_strings({w.cell(c.gamma), w.cell(c.eps), c.kappa ? std::to_string(*c.kappa) : "", c.region});
    }
    r.body = w.str();
  } else {
    json j = header("mode-map");
    json rows = json::array();
    for (const auto& c : cells) {
      json row{{"gamma", num(c.gamma, cfg.precision)},
               {"eps", num(c.eps, cfg.precision)},
               {"kappa", c.kappa ? json(*c.kappa) : json(nullptr)},
               {"region", c.region}};
      if (!c.message.empty()) row["message"] = c.message;
      rows.push_back(row);
    }
    j["cells"] = rows;
    j["computed"] = computed;
    j["total"] = cells.size();
    r.body = j.dump(2) + "\n";
  }
  return r;
}

inline CommandResult cmd_l_curve(const RunConfig& cfg, std::ostream& err) {
  PhaseTimer timer(err);
  const std::vector<double> grid =
      cfg.l_mu_range ? cfg.l_mu_range->values() : default_l_curve_grid(cfg.l_count, cfg.l_eps_max);
  const LCurve lc = l_curve(grid);
  double worst = 0.0;
  for (const auto& pt : lc.points) {
    const GDecomposition d = g_decompose(pt.mu, PlasmaParameters::make(pt.gamma, pt.eps));
    worst = std::max({worst, std::abs(d.g1), std::abs(d.g2)});
  }
  timer.mark("l-curve");
  CommandResult r;
  if (cfg.format.value_or(Format::csv) == Format::csv) {
    CsvWriter w({"mu", "gamma", "eps"}, cfg.precision);
    for (const auto& pt : lc.points) w.row_strings({w.cell(pt.mu), w.cell(pt.gamma), w.cell(pt.eps)});
    r.body = w.str();
  } else {
    json j = header("l-curve");
    json rows = json::array();
    for (const auto& pt : lc.points) {
      rows.push_back({{"mu", num(pt.mu, cfg.precision)}, {"gamma", num(pt.gamma, cfg.precision)}, {"eps", num(pt.eps, cfg.precision)}});
    }
    json skipped = json::array();
    for (const auto& sp : lc.skipped) skipped.push_back({{"mu", num(sp.mu, cfg.precision)}, {"reason", sp.reason}});
    j["points"] = rows;
    j["skipped"] = skipped;
    j["max_abs_g"] = num(worst, cfg.precision);
    r.body = j.dump(2) + "\n";
  }
  return r;
}

inline CommandResult cmd_verify(const RunConfig& cfg, bool as_json, bool flip_t0, std::ostream& err) {
  PhaseTimer timer(err);
  check::CheckOptions opt;
  opt.flip_t0_sign = flip_t0;
  const auto results = check::run_battery(opt);
  timer.mark("verify");
  bool all = true;
  for (const auto& c : results) all = all && c.passed;
  CommandResult r;
  r.status = all ? 0 : 1;
  if (as_json || cfg.format == Format::json) {
    json j = header("verify");
    json rows = json::array();
    for (const auto& c : results) {
      json row{{"name", c.name}, {"passed", c.passed}, {"value", num(c.value, 3)}, {"tolerance", num(c.tolerance, 3)}};
      if (!c.detail.empty()) row["detail"] = c.detail;
      rows.push_back(row);
    }
    j["checks"] = rows;
    j["passed"] = all;
    r.body = j.dump(2) + "\n";
  } else {
    std::ostringstream os;
    for (const auto& c : results) {
      char line[160];
      std::snprintf(line, sizeof line, "%-4s  %-38s %10.3e  (tol %.1e)", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                    c.value, c.tolerance);
      os << line;
      if (!c.detail.empty()) os << "  " << c.detail;
      os << '\n';
    }
    os << (all ? "all checks passed\n" : "some checks FAILED\n");
    r.body = os.str();
  }
  if (!all) {
    json e{{"version", kVersion}, {"error", {{"kind", "residual"}, {"message", "verification failed"}}}};
    for (const auto& c : results)
      if (!c.passed) e["error"]["failed"].push_back(c.name);
    r.error = e;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Entry point

/// Parses arguments (without the program name handling: args[0] is the
/// program name) and runs one command. Output goes to `--out` or `out`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Half-space electron plasma boundary problem solver", "halfspace"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_path, format, e0, gamma_range, eps_range, l_mu_range;
  int precision = 0, threads = 0, x_count = 0, mu_count = 0, l_count = 0, max_depth = 0;
  double gamma = 0, eps = 0, alpha_p = 0, x_max = 0, x_min = 0, l_eps_max = 0, time = 0, rel_tol = 0, abs_tol = 0;
  bool verify_json = false, flip_t0 = false;

  auto* o_config = app.add_option("--config", config_path, "JSON config file");
  auto* o_out = app.add_option("--out", out_path, "output file (default stdout)");
  auto* o_format = app.add_option("--format", format, "csv or json");
  auto* o_precision = app.add_option("--precision", precision, "digits after the decimal point (default 12)");
  auto* o_threads = app.add_option("--threads", threads, "worker threads for sweeps (0 = all cores)");

  std::vector<CLI::Option*> o_params;
  auto add_params = [&](CLI::App* sub) {
    o_params.push_back(sub->add_option("--gamma", gamma, "omega/omega_p - 1"));
    o_params.push_back(sub->add_option("--eps", eps, "nu/omega_p"));
    o_params.push_back(sub->add_option("--alpha-p", alpha_p, "normal momentum accommodation coefficient"));
    o_params.push_back(sub->add_option("--e0", e0, "boundary field amplitude as re,im"));
    o_params.push_back(sub->add_option("--rel-tol", rel_tol, "quadrature relative tolerance"));
    o_params.push_back(sub->add_option("--abs-tol", abs_tol, "quadrature absolute tolerance"));
    o_params.push_back(sub->add_option("--max-depth", max_depth, "quadrature bisection depth cap"));
  };

  auto* solve = app.add_subcommand("solve", "coefficients, classification and residuals");
  add_params(solve);
  auto* profile = app.add_subcommand("profile", "field profile e(x)");
  add_params(profile);
  auto* o_xmax = profile->add_option("--x-max", x_max, "largest depth (default 40)");
  auto* o_xmin = profile->add_option("--x-min", x_min, "first nonzero depth (default 1e-3)");
  auto* o_xcount = profile->add_option("--x-count", x_count, "number of depths including 0 (default 400)");
  auto* o_time_p = profile->add_option("--time", time, "multiply by exp(-i omega_1 t)");
  auto* boundary = app.add_subcommand("boundary", "boundary distribution h(0, mu)");
  add_params(boundary);
  auto* o_mucount = boundary->add_option("--mu-count", mu_count, "nodes per half-interval (default 400)");
  auto* o_time_b = boundary->add_option("--time", time, "multiply by exp(-i omega_1 t)");
  auto* modemap = app.add_subcommand("mode-map", "index of G over a (gamma, eps) grid");
  auto* o_grange = modemap->add_option("--gamma-range", gamma_range, "start:stop:count");
  auto* o_erange = modemap->add_option("--eps-range", eps_range, "start:stop:count");
  auto* lcurve = app.add_subcommand("l-curve", "curve L bounding the region with a plasma mode");
  auto* o_lcount = lcurve->add_option("--count", l_count, "points (default 400)");
  auto* o_lepsmax = lcurve->add_option("--eps-max", l_eps_max, "largest eps on the default grid (default 10)");
  auto* o_lmurange = lcurve->add_option("--mu-range", l_mu_range, "explicit start:stop:count grid in (0, 1)");
  auto* verify = app.add_subcommand("verify", "built-in invariant battery");
  verify->add_flag("--json", verify_json, "machine-readable results");
  verify->add_flag("--inject-t0-sign-flip", flip_t0)->group("");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    json j{{"version", kVersion}, {"error", {{"kind", "validation"}, {"message", e.what()}}}};
    err << j.dump() << '\n';
    return 2;
  }

  CommandResult result;
  RunConfig cfg;
  try {
    if (o_config->count()) load_config(config_path, cfg);
    if (o_out->count()) cfg.out = out_path;
    if (o_format->count()) cfg.format = parse_format(format);
    if (o_precision->count()) cfg.precision = precision;
    if (o_threads->count()) cfg.threads = threads;
    for (auto* o : o_params) {
      if (!o->count()) continue;
      const std::string n = o->get_name();
      if (n == "--gamma") cfg.gamma = gamma;
      if (n == "--eps") cfg.eps = eps;
      if (n == "--alpha-p") cfg.alpha_p = alpha_p;
      if (n == "--e0") cfg.e0 = parse_complex(e0, "e0");
      if (n == "--rel-tol") cfg.tolerances.rel_tol = rel_tol;
      if (n == "--abs-tol") cfg.tolerances.abs_tol = abs_tol;
      if (n == "--max-depth") cfg.tolerances.max_depth = max_depth;
    }
    if (o_xmax->count()) cfg.x_max = x_max;
    if (o_xmin->count()) cfg.x_min = x_min;
    if (o_xcount->count()) cfg.x_count = x_count;
    if (o_time_p->count() || o_time_b->count()) cfg.time = time;
    if (o_mucount->count()) cfg.mu_count = mu_count;
    if (o_grange->count()) cfg.gamma_range = parse_range(gamma_range, "gamma_range");
    if (o_erange->count()) cfg.eps_range = parse_range(eps_range, "eps_range");
    if (o_lcount->count()) cfg.l_count = l_count;
    if (o_lepsmax->count()) cfg.l_eps_max = l_eps_max;
    if (o_lmurange->count()) cfg.l_mu_range = parse_range(l_mu_range, "l_mu_range");
    validate(cfg);

    if (solve->parsed()) result = cmd_solve(cfg, err);
    else if (profile->parsed()) result = cmd_profile(cfg, err);
    else if (boundary->parsed()) result = cmd_boundary(cfg, err);
    else if (modemap->parsed()) result = cmd_mode_map(cfg, err);
    else if (lcurve->parsed()) result = cmd_l_curve(cfg, err);
    else if (verify->parsed()) result = cmd_verify(cfg, verify_json, flip_t0, err);
  } catch (const Error& e) {
    err << error_json(e).dump() << '\n';
    return e.is_structural() ? 2 : 1;
  } catch (const std::exception& e) {
    json j{{"version", kVersion}, {"error", {{"kind", "internal"}, {"message", e.what()}}}};
    err << j.dump() << '\n';
    return 2;
  }

  if (cfg.out.empty()) {
    out << result.body;
  } else {
    std::ofstream f(cfg.out, std::ios::binary);
    f << result.body;
    if (!f) {
      json j{{"version", kVersion}, {"error", {{"kind", "validation"}, {"message", "cannot write output"}, {"field", "out"}}}};
      err << j.dump() << '\n';
      return 2;
    }
  }
  if (result.error) err << result.error->dump() << '\n';
  return result.status;
}

inline int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace halfspace::cli
