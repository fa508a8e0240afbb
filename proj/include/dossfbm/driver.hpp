#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "dossfbm/coeffs.hpp"
#include "dossfbm/fbm.hpp"
#include "dossfbm/flow.hpp"

namespace dossfbm {

enum class TrajectoryKind { y_exact, y_l, y_nn, x_exact, x_n };

std::string_view to_string(TrajectoryKind kind);

struct Provenance {
  std::string coeffs_tag;
  std::uint64_t path_seed = 0;
  int n = 0;
  int l = 0;
  int q = 0;
  double tol = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> values;
  TrajectoryKind kind = TrajectoryKind::y_exact;
  Provenance provenance;
};

/// CSV `t,value` preceded by `#`-prefixed provenance lines.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// g^l(u, z) and its u-derivative h1^l(u, z).
struct DriftValue {
  double g = 0.0;
  double h1 = 0.0;
  /// exp(-int_0^u sigma'(psi(z, r)) dr)
  double weight = 1.0;
};

/// g^l(u, z) = exp(-Q) b(psi(z, u)), Q = int_0^u sigma'(psi(z, r)) dr by
/// 4-point Gauss-Legendre on panels aligned with the partition cells.
double drift_g(const PiecewiseFlow& flow, double u, double z);

/// h1^l(u, z) = -g sigma'(psi) + exp(-Q) b'(psi) d psi/du, right-sided
/// derivative at partition nodes.
double drift_h1(const PiecewiseFlow& flow, double u, double z);

/// Both at once; shares the node data and the quadrature.
DriftValue drift(const PiecewiseFlow& flow, double u, double z);

/// Oracle drift of the exact Y equation:
/// exp(-int_0^u sigma'(phi(z, r)) dr) b(phi(z, u)).
double exact_drift(const CoefficientPair& coeffs, double z, double u, double tol);

struct OdeOptions {
  /// Bisection depth cap for the per-cell step-doubling RK4.
  int max_halvings = 14;
};

/// Y_t = x0 + int_0^t exp(-int_0^{B_s} sigma'(phi(Y_s,u)) du) b(phi(Y_s, B_s)) ds
/// on the path grid. B is linear between grid nodes; each cell is advanced by
/// classical RK4 with step doubling until the local error estimate is below
/// tol * (cell width / T). Inner flows use tolerance tol / 10.
Trajectory integrate_y_exact(const CoefficientPair& coeffs, const FbmPath& path, double x0,
                             double tol, const OdeOptions& opts = {});

/// Same integrator applied to Y^l_t = x0 + int_0^t g^l(B_s, Y^l_s) ds.
Trajectory integrate_y_l(const PiecewiseFlow& flow, const FbmPath& path, double x0, double tol,
                         const OdeOptions& opts = {});

struct SchemeStepOptions {
  /// |Y| beyond this raises NumericError (normally 10 * M).
  double guard_bound = std::numeric_limits<double>::infinity();
  /// Kahan-compensated accumulation of Y.
  bool compensated = false;
};

struct SchemeYResult {
  /// Y^{n,n} at the scheme nodes t_k = kT/n.
  Trajectory nodes;
  /// Y^{n,n} at every node of the simulation grid.
  Trajectory fine;
};

/// Derivative-corrected Euler scheme for Y^{n,n}. The path grid must have
/// q*n steps; the integral of (B_s - B_{t_k}) over each scheme step is the
/// composite trapezoid rule on the q sub-nodes (exact for the linearly
/// interpolated path).
SchemeYResult step_scheme_y(const PiecewiseFlow& flow, const FbmPath& path, double x0, int n,
                            const SchemeStepOptions& opts = {});

}  // namespace dossfbm
