#pragma once

#include <string>

#include "dossfbm/coeffs.hpp"
#include "dossfbm/fbm.hpp"

namespace dossfbm {

struct ConstantInputs {
  CoefficientBounds bounds;
  double horizon = 1.0;
  double x0 = 0.0;
  double sup_norm = 0.0;
  double holder_norm = 0.0;
  double rho = 0.0;
  double hurst = 0.0;
};

/// Truncation bound M and the constants C1..C8 of the error analysis, plus the
/// aggregate C of the pathwise rate bound |X - X^n| <= C n^{-2(H - rho)}.
///
/// C1 appears with two exponents: exp(M2 (||B|| + T)) in the aggregate and
/// exp(2 M2 ||B||) in the Y vs Y^l estimate. Both are kept; `C1` is the
/// larger one and is what every bound check uses. C2 likewise exists with
/// (`C2_lemma`) and without (`C2`) a factor T inside the bracket.
///
/// exp(C1 T) and exp(C7 T) overflow doubles for moderately large ||B||, so
/// the aggregate and the lemma bounds are carried as logarithms. `C_total`
/// is exp(log_C_total) and may be +inf; `overflow_note` then names the
/// offending exponent argument.
struct ConstantSet {
  double M = 0.0;
  double C1 = 0.0;
  double C1_remark = 0.0;
  double C1_lemma = 0.0;
  std::string C1_variant;  // "remark" or "lemma": which one C1 equals
  double C2 = 0.0;
  double C2_lemma = 0.0;
  double C3 = 0.0;
  double C4 = 0.0;
  double C5 = 0.0;
  double C6 = 0.0;
  double C7 = 0.0;
  double C8 = 0.0;
  double C_total = 0.0;
  double log_C_total = 0.0;
  std::string overflow_note;
  ConstantInputs inputs;

  /// log of C n^{-2(H - rho)}.
  double log_theorem_bound(int n) const;
  /// log of exp(C1 T) C2_lemma / n^2.
  double log_y_vs_yl_bound(int n) const;
  /// log of C6 T (T/n)^{2(H - rho)} exp(C7 T).
  double log_yl_vs_ynn_bound(int n) const;
  /// (M2^2 M5 R^3 / 6 l^2) exp(M2 R)
  double phi_vs_phil_bound(int l) const;
  /// (M3 M5^2 R^3 / 6 l^2) exp(2 M2 R)
  double phil_vs_psi_bound(int l) const;
  /// exp(2 M2 R)
  double flow_lipschitz() const;
};

/// Stats may be inflated by `inflation` (>= 1) to cover the gap between the
/// discrete grid statistics and the continuous-path ones.
ConstantSet compute_constants(const CoefficientBounds& bounds, double horizon, double x0,
                              const PathStats& stats, double inflation = 1.0);

}  // namespace dossfbm
