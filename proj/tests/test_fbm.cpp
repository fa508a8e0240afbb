#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "dossfbm/errors.hpp"
#include "dossfbm/fbm.hpp"
#include "test_support.hpp"

using namespace dossfbm;
using Catch::Approx;

TEST_CASE("covariance closed form", "[fbm]") {
  CHECK(covariance(1.0, 1.0, 0.3) == Approx(1.0).margin(1e-15));
  CHECK(covariance(2.0, 1.0, 0.5) == Approx(1.0).margin(1e-15));
  CHECK(covariance(1.0, 0.0, 0.35) == 0.0);
  // H = 1/2 is min(s, t)
  CHECK(covariance(0.3, 0.7, 0.5) == Approx(0.3).margin(1e-15));
  CHECK_THROWS_AS(covariance(1.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(covariance(1.0, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(covariance(-1.0, 1.0, 0.3), DomainError);
}

TEST_CASE("generated paths have the declared grid", "[fbm]") {
  for (auto gen : {FbmGenerator::cholesky, FbmGenerator::circulant}) {
    const FbmPath p = generate_path(gen, 100, 2.5, 0.3, 7);
    REQUIRE(p.times.size() == 101);
    REQUIRE(p.values.size() == 101);
    CHECK(p.values[0] == 0.0);
    CHECK(p.generator == gen);
    CHECK(p.seed == 7);
    for (std::size_t i = 1; i < p.times.size(); ++i) {
      CHECK(p.times[i] > p.times[i - 1]);
      CHECK(std::abs((p.times[i] - p.times[i - 1]) - 0.025) <= 0.025 * 1e-12);
    }
    CHECK(p.times.back() == 2.5);
  }
}

TEST_CASE("generators are deterministic per seed", "[fbm]") {
  for (auto gen : {FbmGenerator::cholesky, FbmGenerator::circulant}) {
    const FbmPath a = generate_path(gen, 256, 1.0, 0.35, 42);
    const FbmPath b = generate_path(gen, 256, 1.0, 0.35, 42);
    const FbmPath c = generate_path(gen, 256, 1.0, 0.35, 43);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
  }
}

TEST_CASE("generator errors", "[fbm]") {
  CHECK_THROWS_AS(generate_cholesky(10, 1.0, 1.2, 0), DomainError);
  CHECK_THROWS_AS(generate_circulant(0, 1.0, 0.3, 0), DomainError);
  CHECK_THROWS_AS(generate_cholesky(5000, 1.0, 0.3, 0), DomainError);
  CHECK_THROWS_AS(generate_cholesky(64, 1.0, 0.3, 0, 32), DomainError);
  CHECK_THROWS_AS(parse_generator("fft"), ConfigError);
  CHECK(parse_generator("cholesky") == FbmGenerator::cholesky);
  CHECK(to_string(FbmGenerator::circulant) == "circulant");
}

TEST_CASE("horizon scaling is exact self-similarity per seed", "[fbm][property]") {
  // Same seed, horizon c: the path is c^H times the unit-horizon path.
  const double h = 0.3, c = 3.7;
  for (auto gen : {FbmGenerator::cholesky, FbmGenerator::circulant}) {
    const FbmPath unit = generate_path(gen, 128, 1.0, h, 5);
    const FbmPath big = generate_path(gen, 128, c, h, 5);
    for (std::size_t i = 0; i <= 128; ++i) {
      CHECK(big.values[i] == Approx(std::pow(c, h) * unit.values[i]).epsilon(1e-12).margin(1e-14));
    }
  }
}

TEST_CASE("Monte Carlo covariance matches the closed form", "[fbm][oracle]") {
  const std::size_t n = 64;
  const int seeds = 3000;
  for (double h : {0.3, 0.5}) {
    for (auto gen : {FbmGenerator::cholesky, FbmGenerator::circulant}) {
      std::vector<double> half, one, quarter;
      for (int s = 0; s < seeds; ++s) {
        const FbmPath p = generate_path(gen, n, 1.0, h, static_cast<std::uint64_t>(s));
        quarter.push_back(p.values[n / 4]);
        half.push_back(p.values[n / 2]);
        one.push_back(p.values[n]);
      }
      const auto c1 = testing::sample_covariance(half, one);
      const auto c2 = testing::sample_covariance(quarter, one);
      const auto v1 = testing::sample_covariance(one, one);
      INFO("H=" << h << " generator=" << to_string(gen));
      CHECK(std::abs(c1.value - covariance(0.5, 1.0, h)) <= 5.0 * c1.std_error);
      CHECK(std::abs(c2.value - covariance(0.25, 1.0, h)) <= 5.0 * c2.std_error);
      CHECK(std::abs(v1.value - 1.0) <= 5.0 * v1.std_error);
    }
  }
}

TEST_CASE("stationary increments", "[fbm][property]") {
  const std::size_t n = 32;
  const double h = 0.35;
  std::vector<std::vector<double>> incs(3);
  const std::pair<std::size_t, std::size_t> pairs[] = {{3, 4}, {10, 20}, {5, 32}};
  for (int s = 0; s < 3000; ++s) {
    const FbmPath p = generate_circulant(n, 1.0, h, static_cast<std::uint64_t>(s));
    for (int k = 0; k < 3; ++k) incs[k].push_back(p.values[pairs[k].second] - p.values[pairs[k].first]);
  }
  for (int k = 0; k < 3; ++k) {
    const auto v = testing::sample_covariance(incs[k], incs[k]);
    const double dt = static_cast<double>(pairs[k].second - pairs[k].first) / n;
    CHECK(std::abs(v.value - std::pow(dt, 2 * h)) <= 5.0 * v.std_error);
  }
}

TEST_CASE("Brownian special case has unit-rate increments", "[fbm]") {
  std::vector<double> inc;
  const std::size_t n = 16;
  for (int s = 0; s < 4000; ++s) {
    const FbmPath p = generate_cholesky(n, 1.0, 0.5, static_cast<std::uint64_t>(s));
    inc.push_back(p.values[8] - p.values[7]);
  }
  const auto v = testing::sample_covariance(inc, inc);
  CHECK(std::abs(v.value - 1.0 / n) <= 5.0 * v.std_error);
}

TEST_CASE("single-step circulant path has variance T^{2H}", "[fbm]") {
  std::vector<double> end;
  const double T = 2.0, h = 0.3;
  for (int s = 0; s < 4000; ++s) {
    end.push_back(generate_circulant(1, T, h, static_cast<std::uint64_t>(s)).values[1]);
  }
  const auto v = testing::sample_covariance(end, end);
  CHECK(std::abs(v.value - std::pow(T, 2 * h)) <= 5.0 * v.std_error);
}

TEST_CASE("cholesky and circulant agree in law", "[fbm][property]") {
  // Two-sample comparison of mean and variance of fixed linear functionals.
  const std::size_t n = 64;
  const double h = 0.3;
  auto functionals = [&](const FbmPath& p) {
    double area = 0.0;
    for (std::size_t i = 1; i <= n; ++i) area += 0.5 * (p.values[i] + p.values[i - 1]) / n;
    return std::array<double, 3>{p.values[n], p.values[n / 3], area};
  };
  std::array<std::vector<double>, 3> a, b;
  for (int s = 0; s < 3000; ++s) {
    const auto fa = functionals(generate_cholesky(n, 1.0, h, static_cast<std::uint64_t>(s)));
    const auto fb = functionals(generate_circulant(n, 1.0, h, static_cast<std::uint64_t>(s + 100000)));
    for (int k = 0; k < 3; ++k) {
      a[k].push_back(fa[k]);
      b[k].push_back(fb[k]);
    }
  }
  for (int k = 0; k < 3; ++k) {
    const auto ma = testing::sample_mean(a[k]), mb = testing::sample_mean(b[k]);
    CHECK(std::abs(ma.value - mb.value) <= 5.0 * std::hypot(ma.std_error, mb.std_error));
    const auto va = testing::sample_covariance(a[k], a[k]);
    const auto vb = testing::sample_covariance(b[k], b[k]);
    CHECK(std::abs(va.value - vb.value) <= 5.0 * std::hypot(va.std_error, vb.std_error));
  }
}

TEST_CASE("path statistics", "[fbm]") {
  FbmPath zero;
  zero.hurst = 0.35;
  zero.steps = 4;
  zero.times = {0, 0.25, 0.5, 0.75, 1.0};
  zero.values.assign(5, 0.0);
  auto st = path_stats(zero, 0.01);
  CHECK(st.sup_norm == 0.0);
  CHECK(st.holder_norm == 0.0);

  FbmPath line = zero;
  line.hurst = 0.35;
  line.values = line.times;
  st = path_stats(line, 0.1);  // H - rho = 0.25
  CHECK(st.sup_norm == 1.0);
  CHECK(st.holder_norm == Approx(1.0).epsilon(1e-14));
  CHECK(st.holder_exponent() == Approx(0.25));

  CHECK_THROWS_AS(path_stats(line, 0.35), DomainError);
  CHECK_THROWS_AS(path_stats(line, 0.0), DomainError);
}

TEST_CASE("Hoelder quotient agrees with the brute-force definition", "[fbm][oracle]") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const FbmPath p = generate_circulant(256, 1.0, 0.35, seed);
    const PathStats st = path_stats(p, 0.01);
    double sup = 0.0, hol = 0.0;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      sup = std::max(sup, std::abs(p.values[i]));
      for (std::size_t j = i + 1; j < p.values.size(); ++j) {
        hol = std::max(hol, std::abs(p.values[j] - p.values[i]) /
                                std::pow(p.times[j] - p.times[i], 0.34));
      }
    }
    CHECK(st.sup_norm == sup);
    CHECK(st.holder_norm == Approx(hol).epsilon(1e-12));
  }
}

TEST_CASE("subsample and interpolate", "[fbm]") {
  const FbmPath p = generate_circulant(64, 1.0, 0.3, 9);
  const FbmPath s = p.subsample(8);
  REQUIRE(s.steps == 8);
  for (std::size_t i = 0; i <= 8; ++i) {
    CHECK(s.values[i] == p.values[8 * i]);
    CHECK(s.times[i] == p.times[8 * i]);
  }
  CHECK_THROWS_AS(p.subsample(5), DomainError);
  CHECK(p.interpolate(p.times[3]) == Approx(p.values[3]).margin(1e-15));
  const double mid = 0.5 * (p.times[3] + p.times[4]);
  CHECK(p.interpolate(mid) == Approx(0.5 * (p.values[3] + p.values[4])).margin(1e-15));
}

TEST_CASE("path CSV dump", "[fbm]") {
  const FbmPath p = generate_circulant(4, 1.0, 0.3, 1);
  std::ostringstream os;
  write_path_csv(os, p);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,B");
  int rows = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    CHECK(std::stod(line.substr(comma + 1)) == p.values[static_cast<std::size_t>(rows)]);
    ++rows;
  }
  CHECK(rows == 5);
}
