#include "dossfbm/constants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <limits>
#include <string>

#include "dossfbm/errors.hpp"

namespace dossfbm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

double log_sum_exp(std::initializer_list<double> logs) {
  double hi = kNegInf;
  for (double v : logs) hi = std::max(hi, v);
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double v : logs) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

double checked_exp(double arg, const char* what) {
  const double v = std::exp(arg);
  if (!std::isfinite(v)) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "constant %s overflows: exp argument %.6g", what, arg);
    throw NumericError(msg);
  }
  return v;
}

}  // namespace

ConstantSet compute_constants(const CoefficientBounds& m, double T, double x0,
                              const PathStats& stats, double inflation) {
  for (double v : {m.M1, m.M2, m.M3, m.M4, m.M5, m.M6, T, x0, stats.sup_norm, stats.holder_norm}) {
    if (!std::isfinite(v)) throw DomainError("constants need finite inputs");
  }
  if (!(T > 0.0)) throw DomainError("horizon must be positive");
  if (!(inflation >= 1.0)) throw DomainError("statistics inflation factor must be >= 1");
  if (!(stats.rho > 0.0 && stats.rho < stats.hurst)) throw DomainError("rho must lie in (0, H)");

  ConstantSet c;
  c.inputs = {m, T, x0, stats.sup_norm * inflation, stats.holder_norm * inflation, stats.rho,
              stats.hurst};
  const double R = c.inputs.sup_norm;
  const double hol = c.inputs.holder_norm;
  const double alpha = stats.hurst - stats.rho;
  const double R3 = R * R * R;

  const double eR = checked_exp(m.M2 * R, "exp(M2 ||B||)");
  const double e2R = checked_exp(2.0 * m.M2 * R, "exp(2 M2 ||B||)");
  const double e3R = checked_exp(3.0 * m.M2 * R, "exp(3 M2 ||B||)");
  const double lip = m.M4 + m.M1 * m.M3 * R;
  const double lemma1 = m.M2 * m.M2 * m.M5 * R3 / 6.0;
  const double lemma2 = m.M3 * m.M5 * m.M5 * R3 / 6.0;

  c.C3 = m.M1 * m.M2 * eR + m.M4 * eR * m.M5 * R * (1.0 + m.M2);
  c.M = std::abs(x0) + T * (m.M1 * eR + hol * c.C3 * std::pow(T, alpha));

  c.C1_remark = lip * checked_exp(m.M2 * (R + T), "C1 exp(M2 (||B|| + T))");
  c.C1_lemma = lip * e2R;
  if (c.C1_remark >= c.C1_lemma) {
    c.C1 = c.C1_remark;
    c.C1_variant = "remark";
  } else {
    c.C1 = c.C1_lemma;
    c.C1_variant = "lemma";
  }

  c.C2 = eR * lip * (lemma1 * eR + lemma2 * e2R);
  c.C2_lemma = eR * lip * (T * lemma1 * eR + T * lemma2 * e2R);
  c.C4 = m.M1 * eR + c.C3 * std::pow(T, alpha) * hol;
  c.C5 = eR * (R * (1.0 + m.M2) *
                   (m.M3 * m.M1 * m.M5 + m.M2 * m.M4 * m.M5 + m.M6 * m.M5 * R * (1.0 + m.M2)) +
               m.M1 * m.M2 + m.M4 * m.M5 * (1.0 + m.M2));
  c.C8 = m.M4 * m.M2 * eR * ((m.M5 + m.M5 * m.M2) * R + m.M5 * m.M2);
  c.C6 = c.C4 * e3R * lip * std::pow(T, 1.0 - 2.0 * alpha) + (c.C5 + c.C8) * hol;
  c.C7 = e3R * lip;

  for (double v : {c.M, c.C1, c.C2, c.C2_lemma, c.C3, c.C4, c.C5, c.C6, c.C7, c.C8}) {
    if (!std::isfinite(v)) throw NumericError("a constant evaluated to a non-finite value");
  }

  // C = exp(2 M2 R) [C2 exp(C1 T) + lemma1 + lemma2 + C6 T exp(C7 T)]
  c.log_C_total = 2.0 * m.M2 * R + log_sum_exp({safe_log(c.C2) + c.C1 * T, safe_log(lemma1),
                                                safe_log(lemma2), safe_log(c.C6 * T) + c.C7 * T});
  c.C_total = c.log_C_total == kNegInf ? 0.0 : std::exp(c.log_C_total);
  if (!std::isfinite(c.C_total)) {
    char msg[200];
    const double arg = std::max(c.C1 * T, c.C7 * T);
    std::snprintf(msg, sizeof msg,
                  "C_total overflows double: exp argument %.6g (%s); log C_total = %.6g", arg,
                  c.C7 * T >= c.C1 * T ? "C7*T" : "C1*T", c.log_C_total);
    c.overflow_note = msg;
  }
  return c;
}

double ConstantSet::log_theorem_bound(int n) const {
  const double alpha = inputs.hurst - inputs.rho;
  return log_C_total - 2.0 * alpha * std::log(static_cast<double>(n));
}

double ConstantSet::log_y_vs_yl_bound(int n) const {
  return C1 * inputs.horizon + safe_log(C2_lemma) - 2.0 * std::log(static_cast<double>(n));
}

double ConstantSet::log_yl_vs_ynn_bound(int n) const {
  const double alpha = inputs.hurst - inputs.rho;
  const double T = inputs.horizon;
  return safe_log(C6 * T) + 2.0 * alpha * std::log(T / n) + C7 * T;
}

double ConstantSet::phi_vs_phil_bound(int l) const {
  const auto& m = inputs.bounds;
  const double R = inputs.sup_norm;
  return m.M2 * m.M2 * m.M5 * R * R * R / (6.0 * l * l) * std::exp(m.M2 * R);
}

double ConstantSet::phil_vs_psi_bound(int l) const {
  const auto& m = inputs.bounds;
  const double R = inputs.sup_norm;
  return m.M3 * m.M5 * m.M5 * R * R * R / (6.0 * l * l) * std::exp(2.0 * m.M2 * R);
}

double ConstantSet::flow_lipschitz() const {
  return std::exp(2.0 * inputs.bounds.M2 * inputs.sup_norm);
}

}  // namespace dossfbm
