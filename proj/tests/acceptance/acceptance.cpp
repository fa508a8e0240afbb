// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dossfbm/bench.hpp"
#include "dossfbm/fbm.hpp"
#include "dossfbm/scheme.hpp"
#include "test_support.hpp"

using namespace dossfbm;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* pattern, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ConvergenceConfig theorem_grid() {
  ConvergenceConfig cfg;
  cfg.hurst_list = {0.3, 0.35, 0.45};
  cfg.n_list = {32, 64, 128, 256, 512};
  for (std::uint64_t s = 0; s < 20; ++s) cfg.seeds.push_back(s);
  cfg.coeffs = {"trig", {1.0, 1.0}};
  cfg.horizon = 1.0;
  cfg.x0 = 0.1;
  cfg.rho = 0.01;
  cfg.q = 8;
  cfg.n_ref = 4096;
  cfg.slope_safety = 0.9;
  return cfg;
}

std::vector<std::string> csv_rows(const ConvergenceReport& rep, double hurst, int n,
                                  std::uint64_t seed) {
  ConvergenceReport subset = rep;
  subset.records.clear();
  for (const auto& r : rep.records) {
    if (r.hurst == hurst && r.n == n && r.seed == seed) subset.records.push_back(r);
  }
  std::ostringstream os;
  write_convergence_csv(os, subset);
  std::vector<std::string> rows;
  std::istringstream in(os.str());
  for (std::string line; std::getline(in, line);) rows.push_back(line);
  return rows;
}

Outcome additive_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int runs = 0;
  for (double h : {0.3, 0.4}) {
    for (int n : {16, 256}) {
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SchemeConfig cfg;
        cfg.hurst = h;
        cfg.n = n;
        cfg.seed = seed;
        cfg.x0 = 0.1;
        cfg.coeffs = {"additive", {1.0}};
        worst = std::max(worst, sup_error(solve_x_scheme(cfg).x_n, solve_x_reference(cfg)));
        ++runs;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && secs < 10.0,
          fmt("%d runs, worst sup_error %.3g (<= 1e-12), %.2f s (< 10 s)", runs, worst, secs)};
}

Outcome theorem_bound(const ConvergenceReport& rep, double secs) {
  int violations = 0;
  double worst_log_ratio = -INFINITY;
  for (const auto& r : rep.records) {
    if (!r.bound_ok) ++violations;
    if (r.sup_error > 0.0) worst_log_ratio = std::max(worst_log_ratio, std::log(r.sup_error) - r.log_bound);
  }
  return {violations == 0 && secs <= 900.0,
          fmt("%zu runs, %d violations, worst error/bound = exp(%.1f), %.1f s (<= 900 s)",
              rep.records.size(), violations, worst_log_ratio, secs)};
}

Outcome empirical_order(const ConvergenceReport& rep) {
  std::string detail;
  bool ok = true;
  for (const auto& s : rep.summaries) {
    ok = ok && s.slope_ok;
    detail += fmt("H=%.2f median order %.3f vs %.3f; ", s.hurst, s.median_order, s.threshold);
  }
  detail += "threshold 0.9 * 2(H - rho)";
  return {ok, detail};
}

struct LemmaOutcome {
  Outcome outcome;
  LemmaReport report;
};

LemmaOutcome lemma_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  LemmaConfig cfg;
  cfg.coeffs = {"trig", {1.0, 1.0}};
  cfg.hurst = 0.35;
  cfg.x0 = 0.1;
  cfg.rho = 0.01;
  cfg.levels = {16, 64, 256};
  cfg.samples = 1000;
  cfg.ns = {64, 256};
  cfg.trajectory_seeds = 20;
  LemmaReport rep = run_lemma_suite(cfg);
  const double secs = seconds_since(t0);
  std::string detail;
  bool ok = secs <= 600.0;
  for (const auto& r : rep.results) {
    if (!r.gating) continue;
    ok = ok && r.passed && r.worst_ratio <= 1.0;
    detail += fmt("%s %.3g; ", r.name.c_str(), r.worst_ratio);
  }
  detail += fmt("%.1f s (<= 600 s)", secs);
  return {{ok && rep.passed(), detail}, std::move(rep)};
}

Outcome taylor_checks(const LemmaReport& lemmas) {
  const double radius = flow_radius(lemmas.stats);
  const int level = 16;
  const auto coeffs = make_coefficients({"trig", {1.0, 1.0}});
  PiecewiseFlow flow(coeffs, build_partition(radius, level));
  const TaylorReport kink = check_taylor_lemma(kink_function(radius, level), 1000, 101);
  const TaylorReport smooth = check_taylor_lemma(smooth_function(radius, level), 1000, 102);
  const TaylorReport psi = check_taylor_lemma(psi_function(flow, 0.1), 1000, 103);
  const bool ok = kink.passed && smooth.passed && psi.passed && kink.worst_ratio >= 0.99;
  return {ok, fmt("kink ratio %.6f (>= 0.99), smooth %.3f, psi %.3f, violations %ld/%ld/%ld",
                  kink.worst_ratio, smooth.worst_ratio, psi.worst_ratio, kink.violations,
                  smooth.violations, psi.violations)};
}

Outcome fbm_distribution() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = 512;
  const int seeds = 10000;
  // (s, t) index pairs of the covariances E[B_s B_t].
  const std::array<std::pair<std::size_t, std::size_t>, 3> pairs{
      {{n / 4, n}, {n / 2, 3 * n / 4}, {n, n}}};
  bool ok = true;
  double worst_z = 0.0, worst_cross = 0.0;
  for (double h : {0.3, 0.5}) {
    std::array<std::array<testing::Estimate, 3>, 2> est;
    int gi = 0;
    for (auto gen : {FbmGenerator::cholesky, FbmGenerator::circulant}) {
      std::array<std::vector<double>, 3> xs, ys;
      const std::uint64_t offset = gen == FbmGenerator::cholesky ? 0 : 1000000;
      for (int s = 0; s < seeds; ++s) {
        const FbmPath p = generate_path(gen, n, 1.0, h, offset + static_cast<std::uint64_t>(s));
        for (int k = 0; k < 3; ++k) {
          xs[k].push_back(p.values[pairs[k].first]);
          ys[k].push_back(p.values[pairs[k].second]);
        }
      }
      for (int k = 0; k < 3; ++k) {
        est[gi][k] = testing::sample_covariance(xs[k], ys[k]);
        const double exact = covariance(static_cast<double>(pairs[k].first) / n,
                                        static_cast<double>(pairs[k].second) / n, h);
        const double z = std::abs(est[gi][k].value - exact) / est[gi][k].std_error;
        worst_z = std::max(worst_z, z);
        ok = ok && z <= 5.0;
      }
      ++gi;
    }
    for (int k = 0; k < 3; ++k) {
      const double z = std::abs(est[0][k].value - est[1][k].value) /
                       std::hypot(est[0][k].std_error, est[1][k].std_error);
      worst_cross = std::max(worst_cross, z);
      ok = ok && z <= 5.0;
    }
  }
  const double secs = seconds_since(t0);
  return {ok && secs <= 300.0,
          fmt("worst |cov - exact| = %.2f SE, worst cholesky vs circulant = %.2f sigma (<= 5), "
              "%.1f s (<= 300 s)",
              worst_z, worst_cross, secs)};
}

Outcome oracle_consistency() {
  double worst = 0.0;
  const auto coeffs = make_coefficients({"gudermann", {1.0}});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const FbmPath path = generate_circulant(2048, 1.0, 0.35, seed);
    const ReferenceRun ref = solve_x_reference_on(coeffs, path, 0.0, 1e-10);
    for (std::size_t i = 0; i < path.values.size(); ++i) {
      const double exact = 2.0 * std::atan(std::tanh(0.5 * path.values[i]));
      worst = std::max(worst, std::abs(ref.x_fine.values[i] - exact));
    }
  }
  return {worst <= 1e-9, fmt("5 seeds, worst sup error %.3g (<= 1e-9)", worst)};
}

Outcome determinism(const ConvergenceReport& full) {
  ConvergenceConfig cfg = theorem_grid();
  cfg.hurst_list = {0.3};
  cfg.seeds = {0};
  const auto a = csv_rows(run_convergence(cfg), 0.3, 32, 0);
  const auto b = csv_rows(run_convergence(cfg), 0.3, 32, 0);
  const auto c = csv_rows(full, 0.3, 32, 0);
  const bool ok = a.size() == 2 && a == b && a == c;
  return {ok, fmt("cell H=0.3 n=32 seed=0: repeat %s, full grid %s",
                  a == b ? "identical" : "DIFFERS", a == c ? "identical" : "DIFFERS")};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* title, const std::function<Outcome()>& run) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.passed) ++failures;
    std::printf("criterion %d [%s] %s: %s\n", id, o.passed ? "PASS" : "FAIL", title,
                o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "additive exactness", additive_exactness);

  ConvergenceReport grid;
  double grid_secs = 0.0;
  bool grid_ok = true;
  std::string grid_error;
  try {
    const auto t0 = std::chrono::steady_clock::now();
    grid = run_convergence(theorem_grid());
    grid_secs = seconds_since(t0);
  } catch (const std::exception& e) {
    grid_ok = false;
    grid_error = e.what();
  }
  auto needs_grid = [&](std::function<Outcome()> fn) {
    return [=]() -> Outcome {
      if (!grid_ok) return {false, "convergence grid failed: " + grid_error};
      return fn();
    };
  };
  report(2, "pathwise bound", needs_grid([&] { return theorem_bound(grid, grid_secs); }));
  report(3, "empirical order", needs_grid([&] { return empirical_order(grid); }));

  LemmaReport lemmas;
  bool lemmas_ok = false;
  report(4, "lemma suite", [&] {
    LemmaOutcome lo = lemma_suite();
    lemmas = std::move(lo.report);
    lemmas_ok = true;
    return lo.outcome;
  });
  report(5, "Taylor inequality with jumps", [&]() -> Outcome {
    if (!lemmas_ok) return {false, "lemma suite did not run"};
    return taylor_checks(lemmas);
  });
  report(6, "fBm distribution", fbm_distribution);
  report(7, "closed-form oracle", oracle_consistency);
  report(8, "determinism", needs_grid([&] { return determinism(grid); }));

  std::printf("acceptance: %s (%d of 8 failed)\n", failures == 0 ? "PASS" : "FAIL", failures);
  return failures == 0 ? 0 : 1;
}
