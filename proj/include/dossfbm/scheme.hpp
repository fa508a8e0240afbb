#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dossfbm/coeffs.hpp"
#include "dossfbm/constants.hpp"
#include "dossfbm/driver.hpp"
#include "dossfbm/fbm.hpp"

namespace dossfbm {

struct CoefficientSpec {
  std::string family = "trig";
  std::vector<double> params{1.0, 1.0};
  /// Replaces individual declared bounds (deliberately wrong bounds are
  /// allowed here; they are reported, not rejected).
  std::optional<double> M1, M2, M3, M4, M5, M6;

  bool has_override() const { return M1 || M2 || M3 || M4 || M5 || M6; }
  bool operator==(const CoefficientSpec&) const = default;
};

CoefficientPair make_coefficients(const CoefficientSpec& spec);

struct SchemeConfig {
  int n = 64;
  int q = 8;
  double hurst = 0.35;
  double horizon = 1.0;
  double x0 = 0.0;
  double rho = 0.01;
  std::uint64_t seed = 0;
  CoefficientSpec coeffs;
  double oracle_tol = 1e-10;
  FbmGenerator generator = FbmGenerator::circulant;
  /// Flow level; 0 ties it to n.
  int flow_level = 0;
  double stat_inflation = 1.0;
  bool compensated = false;

  int level() const { return flow_level > 0 ? flow_level : n; }
  bool operator==(const SchemeConfig&) const = default;
};

/// Throws ConfigError naming the field. Returns a warning message (empty if
/// none) when H lies outside (1/4, 1/2), where no rate is asserted.
std::string validate(const SchemeConfig& cfg);

/// Radius of the flow box for a path: its discrete sup norm, or 1 for the
/// identically-zero path (any positive radius covers it).
double flow_radius(const PathStats& stats);

/// Blow-up check for Y^{n,n}: 10 max(M, |x0|, 1). Y^{n,n} may sit anywhere in
/// [-M, M]; the floor keeps the flow domain nonempty when M = 0.
double blowup_guard(const ConstantSet& constants, double x0);

struct SchemeRun {
  FbmPath path;
  PathStats stats;
  ConstantSet constants;
  Trajectory y_nn;
  Trajectory x_n;
};

/// X^n_{t_k} = psi^n(Y^{n,n}_{t_k}, B_{t_k}) on the given path (q*n steps).
SchemeRun solve_x_scheme_on(const CoefficientPair& coeffs, const FbmPath& path,
                            const SchemeConfig& cfg);

/// Generates the seeded path with q*n steps and runs the scheme on it.
SchemeRun solve_x_scheme(const SchemeConfig& cfg);

struct ReferenceRun {
  Trajectory y;
  /// X on every node of the path grid.
  Trajectory x_fine;
};

/// X_t = phi(Y_t, B_t) with Y from integrate_y_exact, on every path node.
ReferenceRun solve_x_reference_on(const CoefficientPair& coeffs, const FbmPath& path, double x0,
                                  double tol);

/// Reference on the same seeded path as solve_x_scheme, restricted to the
/// scheme nodes.
Trajectory solve_x_reference(const SchemeConfig& cfg);

/// Keep every stride-th node of a trajectory.
Trajectory restrict_to(const Trajectory& traj, std::size_t stride);

/// max_i |a_i - b_i|; the time grids must agree.
double sup_error(const Trajectory& a, const Trajectory& b);

}  // namespace dossfbm
