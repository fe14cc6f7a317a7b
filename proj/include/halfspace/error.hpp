#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace halfspace {

enum class ErrorKind {
  validation,      // bad input parameter
  endpoint,        // evaluation at a logarithmic endpoint
  cut,             // evaluation on a branch cut where the closed form is undefined
  resonance,       // boundary value of the dispersion function (nearly) vanishes
  near_l,          // parameters within the band around the curve L
  no_convergence,  // iteration or refinement budget exhausted
  degenerate,      // degenerate denominator or non-simple zero
  contour,         // contour passes too close to a zero, or non-integer count
  residual,        // a verified identity or boundary condition failed
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::endpoint: return "endpoint";
    case ErrorKind::cut: return "cut";
    case ErrorKind::resonance: return "resonance";
    case ErrorKind::near_l: return "near_L";
    case ErrorKind::no_convergence: return "no_convergence";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::contour: return "contour";
    case ErrorKind::residual: return "residual";
  }
  return "unknown";
}

/// Exception carrying a machine-readable kind and, for validation errors,
/// the offending field name.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string field = {})
      : std::runtime_error(message), kind_(kind), field_(std::move(field)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& field() const noexcept { return field_; }

  /// Structural errors map to exit code 2, residual failures to 1.
  bool is_structural() const noexcept { return kind_ != ErrorKind::residual; }

 private:
  ErrorKind kind_;
  std::string field_;
};

}  // namespace halfspace
