#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dossfbm/coeffs.hpp"
#include "dossfbm/fbm.hpp"
#include "dossfbm/flow.hpp"
#include "dossfbm/scheme.hpp"

namespace dossfbm {

/// Number of workers used when 0 is requested.
unsigned default_workers();

// ---------------------------------------------------------------- convergence

struct ConvergenceConfig {
  std::vector<double> hurst_list{0.3, 0.35, 0.45};
  std::vector<int> n_list{32, 64, 128, 256, 512};
  std::vector<std::uint64_t> seeds;
  CoefficientSpec coeffs;
  double horizon = 1.0;
  double x0 = 0.1;
  double rho = 0.01;
  int q = 8;
  /// Steps of the reference path; 0 means q * max(n_list).
  int n_ref = 0;
  double oracle_tol = 1e-10;
  /// The median slope must reach slope_safety * 2(H - rho).
  double slope_safety = 0.9;
  double stat_inflation = 1.0;
  FbmGenerator generator = FbmGenerator::circulant;
  unsigned workers = 0;

  int reference_steps() const;
};

/// Throws ConfigError on a malformed grid.
void validate(const ConvergenceConfig& cfg);

struct ConvergenceRecord {
  double hurst = 0.0;
  int n = 0;
  std::uint64_t seed = 0;
  int q = 0;
  double rho = 0.0;
  double sup_error = 0.0;
  /// C n^{-2(H - rho)}; +inf when C itself overflows.
  double bound = 0.0;
  double log_bound = 0.0;
  bool bound_ok = false;
  double wall_ms = 0.0;
};

struct SlopeSummary {
  double hurst = 0.0;
  double target_order = 0.0;
  double threshold = 0.0;
  /// Observed orders (minus the log-log slope), one per fitted seed.
  std::vector<double> seed_orders;
  double median_order = 0.0;
  /// Median over seeds of the error, per entry of n_list.
  std::vector<double> median_errors;
  bool median_error_decreasing = false;
  bool exact_family = false;
  bool slope_ok = false;
  int bound_violations = 0;
};

struct ConvergenceReport {
  ConvergenceConfig config;
  std::vector<ConvergenceRecord> records;  // sorted by (H, n, seed)
  std::vector<SlopeSummary> summaries;     // one per H, in hurst_list order
  double total_wall_ms = 0.0;
  bool bounds_ok() const;
  bool slopes_ok() const;
  bool passed() const { return bounds_ok() && slopes_ok(); }
};

ConvergenceReport run_convergence(const ConvergenceConfig& cfg);

/// Least-squares slope of log(err) against log(n).
double fit_loglog_slope(const std::vector<int>& ns, const std::vector<double>& errors);

/// Columns H,n,seed,q,rho,sup_error,bound,bound_ok and, when asked, wall_ms.
void write_convergence_csv(std::ostream& os, const ConvergenceReport& report,
                           bool include_wall_ms = false);

// ---------------------------------------------------------------- lemmas

struct LemmaConfig {
  CoefficientSpec coeffs;
  double hurst = 0.35;
  double horizon = 1.0;
  double x0 = 0.1;
  double rho = 0.01;
  std::uint64_t seed = 0;
  std::vector<int> levels{16, 64, 256};
  /// (z, u) samples per level for the flow lemmas.
  int samples = 1000;
  std::vector<int> ns{64, 256};
  int trajectory_seeds = 20;
  int q = 8;
  double oracle_tol = 1e-10;
  double stat_inflation = 1.0;
  FbmGenerator generator = FbmGenerator::circulant;
  unsigned workers = 0;
};

void validate(const LemmaConfig& cfg);

struct LemmaResult {
  std::string name;
  std::string statement;
  /// Largest observed / (bound + roundoff slack) over all samples.
  double worst_ratio = 0.0;
  double worst_observed = 0.0;
  double worst_bound = 0.0;
  /// Human-readable description of the worst sample.
  std::string witness;
  long samples = 0;
  /// Every bound was zero and every observation was roundoff.
  bool vacuous = false;
  /// Informational checks are reported but do not decide the suite.
  bool gating = true;
  bool passed = false;
  std::string error;
};

struct LemmaReport {
  std::vector<LemmaResult> results;
  PathStats stats;
  ConstantSet constants;
  bool passed() const;
};

LemmaReport run_lemma_suite(const LemmaConfig& cfg);

// ---------------------------------------------------------------- Taylor bound

/// Continuous function on [nodes.front(), nodes.back()] that is C^2 inside each
/// cell, with one-sided derivatives at the nodes and a common bound on |f''|.
struct PiecewiseC2Function {
  std::string name;
  std::vector<double> nodes;
  std::function<double(double)> value;
  std::function<double(double)> right_derivative;
  std::function<double(double)> left_derivative;
  double second_derivative_bound = 0.0;
};

struct TaylorReport {
  std::string name;
  long samples = 0;
  double worst_ratio = 0.0;
  double worst_x = 0.0;
  double worst_y = 0.0;
  long violations = 0;
  bool passed = false;
};

/// Samples x < y in [-R, R], checks
///   |f(y) - f(x) - f'(x+)(y - x)| <= C/2 (y - x)^2 + sum_p |jump of f' at u_p| (y - u_p)
/// over the nodes u_p in [x, y). A small roundoff slack is allowed.
TaylorReport check_taylor_lemma(const PiecewiseC2Function& f, long samples, std::uint64_t seed);

/// Evaluates the right-hand side above.
double taylor_bound(const PiecewiseC2Function& f, double x, double y);

/// |x| on [-R, R], nodes at the uniform partition of level l (so 0 is a node).
PiecewiseC2Function kink_function(double radius, int level);
/// sin on [-R, R] with the same partition; no jumps, C = 1.
PiecewiseC2Function smooth_function(double radius, int level);
/// u -> psi(z, u) of a level-l flow; the flow must outlive the result.
PiecewiseC2Function psi_function(const PiecewiseFlow& flow, double z);

}  // namespace dossfbm
