#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>

namespace dossfbm {

using ScalarFn = std::function<double(double)>;

/// Sup bounds of the coefficients and their derivatives on the real line:
/// |b| <= M1, |b'| <= M4, |b''| <= M6, |sigma| <= M5, |sigma'| <= M2,
/// |sigma''| <= M3.
struct CoefficientBounds {
  double M1 = 0.0;
  double M2 = 0.0;
  double M3 = 0.0;
  double M4 = 0.0;
  double M5 = 0.0;
  double M6 = 0.0;

  bool operator==(const CoefficientBounds&) const = default;
};

struct CoefficientFunctions {
  ScalarFn b, db, d2b;
  ScalarFn sigma, dsigma, d2sigma;
};

enum class BoundsCheck { spot_check, skip };

/// Drift b and diffusion sigma, both C^2 with bounded derivatives, together
/// with declared bounds. Construction spot-checks the bounds and derivative
/// consistency on [-spot_radius, spot_radius] unless told to skip.
class CoefficientPair {
 public:
  static constexpr double spot_radius = 50.0;

  CoefficientPair(CoefficientFunctions fns, CoefficientBounds bounds, std::string tag,
                  BoundsCheck check = BoundsCheck::spot_check);

  double b(double z) const { return fns_.b(z); }
  double db(double z) const { return fns_.db(z); }
  double d2b(double z) const { return fns_.d2b(z); }
  double sigma(double z) const { return fns_.sigma(z); }
  double dsigma(double z) const { return fns_.dsigma(z); }
  double d2sigma(double z) const { return fns_.d2sigma(z); }

  const CoefficientBounds& bounds() const { return bounds_; }
  const std::string& tag() const { return tag_; }
  const CoefficientFunctions& functions() const { return fns_; }

  /// Same functions with replaced bounds and no spot check. Meant for
  /// deliberately wrong bounds in ablation runs; validate_bounds will flag it.
  CoefficientPair with_bounds(const CoefficientBounds& bounds) const;

 private:
  CoefficientFunctions fns_;
  CoefficientBounds bounds_;
  std::string tag_;
};

/// Built-in families, all in C^2_b:
///   additive(c)          b = 0,          sigma = c
///   trig(a_b, a_s)       b = a_b sin,    sigma = a_s cos
///   gudermann(a)         b = 0,          sigma = a cos
///   zero_drift_trig(a_s) same as gudermann
/// Throws ConfigError for an unknown name or wrong parameter count.
CoefficientPair builtin_family(std::string_view name, std::span<const double> params);

struct BoundsReport {
  double worst_margin = 0.0;        // max(|f| - bound); <= 0 means pass
  std::string worst_margin_field;   // "M1".."M6"
  double worst_margin_at = 0.0;
  double worst_fd_mismatch = 0.0;   // relative derivative vs central difference
  std::string worst_fd_field;
  bool passed = true;
};

inline constexpr double kFiniteDifferenceStep = 1e-5;
inline constexpr double kFiniteDifferenceTolerance = 1e-6;

BoundsReport validate_bounds(const CoefficientPair& pair, double radius, std::size_t samples);

}  // namespace dossfbm
