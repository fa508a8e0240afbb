#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "dossfbm/coeffs.hpp"
#include "dossfbm/errors.hpp"

using namespace dossfbm;
using Catch::Approx;

namespace {

CoefficientPair family(std::string_view name, std::vector<double> params) {
  return builtin_family(name, params);
}

}  // namespace

TEST_CASE("additive family", "[coeffs]") {
  const auto p = family("additive", {2.0});
  CHECK(p.sigma(3.7) == 2.0);
  CHECK(p.dsigma(3.7) == 0.0);
  CHECK(p.b(3.7) == 0.0);
  CHECK(p.bounds().M5 == 2.0);
  CHECK(p.bounds().M2 == 0.0);
  CHECK(p.bounds().M3 == 0.0);
  CHECK(p.tag() == "additive(2)");
}

TEST_CASE("trig family", "[coeffs]") {
  const auto p = family("trig", {1.0, 1.0});
  CHECK(p.b(std::numbers::pi / 2) == Approx(1.0).margin(1e-15));
  CHECK(p.sigma(0.0) == 1.0);
  const CoefficientBounds ones{1, 1, 1, 1, 1, 1};
  CHECK(p.bounds() == ones);

  const auto q = family("trig", {-2.0, 0.5});
  CHECK(q.bounds().M1 == 2.0);
  CHECK(q.bounds().M4 == 2.0);
  CHECK(q.bounds().M6 == 2.0);
  CHECK(q.bounds().M5 == 0.5);
  CHECK(q.bounds().M2 == 0.5);
  CHECK(q.bounds().M3 == 0.5);
}

TEST_CASE("gudermann and zero-drift trig families", "[coeffs]") {
  const auto g = family("gudermann", {1.0});
  CHECK(g.d2sigma(0.0) == -1.0);
  CHECK(g.b(1.3) == 0.0);
  const auto z = family("zero_drift_trig", {1.0});
  for (double x : {-2.0, 0.0, 0.7}) {
    CHECK(z.sigma(x) == g.sigma(x));
    CHECK(z.dsigma(x) == g.dsigma(x));
  }
  CHECK(z.bounds() == g.bounds());
}

TEST_CASE("family errors", "[coeffs]") {
  CHECK_THROWS_AS(family("linear", {1.0}), ConfigError);
  CHECK_THROWS_AS(family("trig", {1.0}), ConfigError);
  CHECK_THROWS_AS(family("additive", {}), ConfigError);
  CHECK_THROWS_AS(family("additive", {NAN}), ConfigError);
  try {
    family("nope", {});
  } catch (const ConfigError& e) {
    CHECK(e.field() == "coeffs.family");
  }
}

TEST_CASE("every built-in family passes validation on [-100, 100]", "[coeffs][property]") {
  const std::vector<std::pair<std::string, std::vector<double>>> cases = {
      {"additive", {2.0}}, {"trig", {1.0, 1.0}}, {"trig", {0.3, -1.7}},
      {"gudermann", {1.0}}, {"zero_drift_trig", {2.5}}};
  for (const auto& [name, params] : cases) {
    const auto rep = validate_bounds(family(name, params), 100.0, 100000);
    INFO(name);
    CHECK(rep.passed);
    CHECK(rep.worst_margin <= 0.0);
    CHECK(rep.worst_fd_mismatch <= kFiniteDifferenceTolerance);
  }
}

TEST_CASE("validation examples", "[coeffs]") {
  const auto trig = family("trig", {1.0, 1.0});
  auto rep = validate_bounds(trig, 10.0, 10000);
  CHECK(rep.passed);
  CHECK(rep.worst_margin <= 0.0);

  CoefficientBounds halved = trig.bounds();
  halved.M5 = 0.5;
  rep = validate_bounds(trig.with_bounds(halved), 10.0, 10000);
  CHECK_FALSE(rep.passed);
  CHECK(rep.worst_margin_field == "M5");
  CHECK(rep.worst_margin == Approx(0.5).margin(1e-6));

  CHECK(validate_bounds(family("additive", {3.0}), 1e3, 2).passed);
  CHECK_THROWS_AS(validate_bounds(trig, 1.0, 1), DomainError);
}

TEST_CASE("finite-difference consistency of derivative evaluators", "[coeffs][oracle]") {
  const double h = 1e-5;
  for (const auto& p : {family("trig", {1.0, 1.0}), family("gudermann", {1.0}),
                        family("trig", {2.0, 0.5})}) {
    for (double z = -20.0; z <= 20.0; z += 0.37) {
      const auto fd = [&](double (CoefficientPair::*f)(double) const) {
        return ((p.*f)(z + h) - (p.*f)(z - h)) / (2 * h);
      };
      CHECK(std::abs(p.db(z) - fd(&CoefficientPair::b)) <= 1e-6 * (1 + std::abs(p.db(z))));
      CHECK(std::abs(p.d2b(z) - fd(&CoefficientPair::db)) <= 1e-6 * (1 + std::abs(p.d2b(z))));
      CHECK(std::abs(p.dsigma(z) - fd(&CoefficientPair::sigma)) <=
            1e-6 * (1 + std::abs(p.dsigma(z))));
      CHECK(std::abs(p.d2sigma(z) - fd(&CoefficientPair::dsigma)) <=
            1e-6 * (1 + std::abs(p.d2sigma(z))));
    }
  }
}

TEST_CASE("user pairs must declare valid bounds", "[coeffs]") {
  CoefficientFunctions f;
  f.b = [](double x) { return std::sin(x); };
  f.db = [](double x) { return std::cos(x); };
  f.d2b = [](double x) { return -std::sin(x); };
  f.sigma = [](double) { return 1.0; };
  f.dsigma = [](double) { return 0.0; };
  f.d2sigma = [](double) { return 0.0; };
  CHECK_NOTHROW(CoefficientPair(f, {1, 0, 0, 1, 1, 1}, "custom"));
  // |b| reaches 1 but M1 is declared 0.5
  CHECK_THROWS_AS(CoefficientPair(f, {0.5, 0, 0, 1, 1, 1}, "custom"), ConfigError);
  // a wrong derivative evaluator
  CoefficientFunctions g = f;
  g.db = [](double x) { return std::sin(x); };
  CHECK_THROWS_AS(CoefficientPair(g, {1, 0, 0, 1, 1, 1}, "custom"), ConfigError);
  CHECK_THROWS_AS(CoefficientPair(f, {-1, 0, 0, 1, 1, 1}, "custom"), ConfigError);
  CHECK_NOTHROW(CoefficientPair(f, {0.5, 0, 0, 1, 1, 1}, "custom", BoundsCheck::skip));
}
