#include "dossfbm/coeffs.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>

#include "dossfbm/errors.hpp"

namespace dossfbm {

namespace {

std::string format_tag(std::string_view name, std::span<const double> params) {
  std::string tag(name);
  tag += '(';
  for (std::size_t i = 0; i < params.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", params[i]);
    if (i) tag += ',';
    tag += buf;
  }
  tag += ')';
  return tag;
}

ScalarFn constant(double c) {
  return [c](double) { return c; };
}

ScalarFn scaled(double a, double (*f)(double)) {
  return [a, f](double z) { return a * f(z); };
}

double neg_sin(double z) { return -std::sin(z); }
double neg_cos(double z) { return -std::cos(z); }
double sin_fn(double z) { return std::sin(z); }
double cos_fn(double z) { return std::cos(z); }

}  // namespace

CoefficientPair::CoefficientPair(CoefficientFunctions fns, CoefficientBounds bounds,
                                 std::string tag, BoundsCheck check)
    : fns_(std::move(fns)), bounds_(bounds), tag_(std::move(tag)) {
  if (!fns_.b || !fns_.db || !fns_.d2b || !fns_.sigma || !fns_.dsigma || !fns_.d2sigma) {
    throw ConfigError("coefficient pair '" + tag_ + "' is missing an evaluator", "coeffs");
  }
  for (double m : {bounds_.M1, bounds_.M2, bounds_.M3, bounds_.M4, bounds_.M5, bounds_.M6}) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw ConfigError("coefficient bounds must be finite and nonnegative", "coeffs.bounds");
    }
  }
  if (check == BoundsCheck::spot_check) {
    const BoundsReport rep = validate_bounds(*this, spot_radius, 2001);
    if (!rep.passed) {
      char msg[256];
      std::snprintf(msg, sizeof msg,
                    "coefficient pair '%s' fails its declared bounds: %s margin %.3e, "
                    "derivative mismatch %.3e (%s)",
                    tag_.c_str(), rep.worst_margin_field.c_str(), rep.worst_margin,
                    rep.worst_fd_mismatch, rep.worst_fd_field.c_str());
      throw ConfigError(msg, "coeffs.bounds");
    }
  }
}

CoefficientPair CoefficientPair::with_bounds(const CoefficientBounds& bounds) const {
  return CoefficientPair(fns_, bounds, tag_, BoundsCheck::skip);
}

CoefficientPair builtin_family(std::string_view name, std::span<const double> params) {
  auto expect = [&](std::size_t count) {
    if (params.size() != count) {
      throw ConfigError("family '" + std::string(name) + "' takes " + std::to_string(count) +
                            " parameter(s), got " + std::to_string(params.size()),
                        "coeffs.params");
    }
    for (double p : params) {
      if (!std::isfinite(p)) throw ConfigError("family parameters must be finite", "coeffs.params");
    }
  };
  const std::string tag = format_tag(name, params);

  if (name == "additive") {
    expect(1);
    const double c = params[0];
    CoefficientFunctions f{constant(0.0), constant(0.0), constant(0.0),
                           constant(c),   constant(0.0), constant(0.0)};
    CoefficientBounds m;
    m.M5 = std::abs(c);
    return CoefficientPair(std::move(f), m, tag);
  }
  if (name == "trig") {
    expect(2);
    const double ab = params[0];
    const double as = params[1];
    CoefficientFunctions f{scaled(ab, sin_fn), scaled(ab, cos_fn), scaled(ab, neg_sin),
                           scaled(as, cos_fn), scaled(as, neg_sin), scaled(as, neg_cos)};
    CoefficientBounds m{std::abs(ab), std::abs(as), std::abs(as),
                        std::abs(ab), std::abs(as), std::abs(ab)};
    return CoefficientPair(std::move(f), m, tag);
  }
  if (name == "gudermann" || name == "zero_drift_trig") {
    expect(1);
    const double a = params[0];
    CoefficientFunctions f{constant(0.0),     constant(0.0),      constant(0.0),
                           scaled(a, cos_fn), scaled(a, neg_sin), scaled(a, neg_cos)};
    CoefficientBounds m;
    m.M2 = m.M3 = m.M5 = std::abs(a);
    return CoefficientPair(std::move(f), m, tag);
  }
  throw ConfigError("unknown coefficient family '" + std::string(name) + "'", "coeffs.family");
}

BoundsReport validate_bounds(const CoefficientPair& pair, double radius, std::size_t samples) {
  if (samples < 2) throw DomainError("validate_bounds needs at least 2 samples");
  const auto& m = pair.bounds();
  const auto& f = pair.functions();
  struct Check {
    const ScalarFn* fn;
    double bound;
    const char* name;
  };
  const Check checks[] = {{&f.b, m.M1, "M1"},      {&f.db, m.M4, "M4"},     {&f.d2b, m.M6, "M6"},
                          {&f.sigma, m.M5, "M5"},  {&f.dsigma, m.M2, "M2"}, {&f.d2sigma, m.M3, "M3"}};
  struct FdCheck {
    const ScalarFn* base;
    const ScalarFn* deriv;
    const char* name;
  };
  const FdCheck fd_checks[] = {{&f.b, &f.db, "b'"},
                               {&f.db, &f.d2b, "b''"},
                               {&f.sigma, &f.dsigma, "sigma'"},
                               {&f.dsigma, &f.d2sigma, "sigma''"}};

  BoundsReport rep;
  rep.worst_margin = -std::numeric_limits<double>::infinity();
  const double h = kFiniteDifferenceStep;
  for (std::size_t i = 0; i < samples; ++i) {
    const double z = -radius + 2.0 * radius * static_cast<double>(i) /
                                   static_cast<double>(samples - 1);
    for (const auto& c : checks) {
      const double margin = std::abs((*c.fn)(z)) - c.bound;
      if (margin > rep.worst_margin) {
        rep.worst_margin = margin;
        rep.worst_margin_field = c.name;
        rep.worst_margin_at = z;
      }
    }
    for (const auto& c : fd_checks) {
      const double d = (*c.deriv)(z);
      const double fd = ((*c.base)(z + h) - (*c.base)(z - h)) / (2.0 * h);
      const double mismatch = std::abs(d - fd) / (1.0 + std::abs(d));
      if (mismatch > rep.worst_fd_mismatch) {
        rep.worst_fd_mismatch = mismatch;
        rep.worst_fd_field = c.name;
      }
    }
  }
  rep.passed = rep.worst_margin <= 0.0 && rep.worst_fd_mismatch <= kFiniteDifferenceTolerance;
  return rep;
}

}  // namespace dossfbm
