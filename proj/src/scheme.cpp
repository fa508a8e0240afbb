#include "dossfbm/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "dossfbm/errors.hpp"
#include "dossfbm/flow.hpp"

namespace dossfbm {

CoefficientPair make_coefficients(const CoefficientSpec& spec) {
  CoefficientPair pair = builtin_family(spec.family, spec.params);
  if (!spec.has_override()) return pair;
  CoefficientBounds b = pair.bounds();
  if (spec.M1) b.M1 = *spec.M1;
  if (spec.M2) b.M2 = *spec.M2;
  if (spec.M3) b.M3 = *spec.M3;
  if (spec.M4) b.M4 = *spec.M4;
  if (spec.M5) b.M5 = *spec.M5;
  if (spec.M6) b.M6 = *spec.M6;
  for (double v : {b.M1, b.M2, b.M3, b.M4, b.M5, b.M6}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError("bound overrides must be finite and nonnegative", "coeffs.bounds_override");
    }
  }
  return pair.with_bounds(b);
}

std::string validate(const SchemeConfig& cfg) {
  if (cfg.n < 1) throw ConfigError("n must be >= 1", "n");
  if (cfg.q < 2) throw ConfigError("q must be >= 2", "q");
  if (cfg.flow_level < 0) throw ConfigError("flow_level must be >= 0", "flow_level");
  if (!(cfg.hurst > 0.0 && cfg.hurst < 1.0)) throw ConfigError("hurst must lie in (0,1)", "hurst");
  if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) {
    throw ConfigError("T must be positive", "T");
  }
  if (!std::isfinite(cfg.x0)) throw ConfigError("x0 must be finite", "x0");
  if (!(cfg.rho > 0.0 && cfg.rho < cfg.hurst)) throw ConfigError("rho must lie in (0, hurst)", "rho");
  if (!(cfg.oracle_tol >= 1e-13)) throw ConfigError("oracle_tol must be >= 1e-13", "oracle_tol");
  if (!(cfg.stat_inflation >= 1.0)) {
    throw ConfigError("stat_inflation must be >= 1", "stat_inflation");
  }
  if (cfg.generator == FbmGenerator::cholesky &&
      static_cast<std::size_t>(cfg.n) * static_cast<std::size_t>(cfg.q) > kCholeskyCap) {
    throw ConfigError("q*n exceeds the cholesky generator cap", "generator");
  }
  if (!(cfg.hurst > 0.25 && cfg.hurst < 0.5)) {
    return "hurst outside (1/4, 1/2): the scheme runs but no convergence rate is asserted";
  }
  return {};
}

double blowup_guard(const ConstantSet& constants, double x0) {
  return 10.0 * std::max({constants.M, std::abs(x0), 1.0});
}

double flow_radius(const PathStats& stats) { return stats.sup_norm > 0.0 ? stats.sup_norm : 1.0; }

SchemeRun solve_x_scheme_on(const CoefficientPair& coeffs, const FbmPath& path,
                            const SchemeConfig& cfg) {
  SchemeRun run;
  run.path = path;
  run.stats = path_stats(path, cfg.rho);
  run.constants =
      compute_constants(coeffs.bounds(), path.horizon, cfg.x0, run.stats, cfg.stat_inflation);
  const int l = cfg.level();
  const double guard = blowup_guard(run.constants, cfg.x0);
  PiecewiseFlow flow(coeffs, build_partition(flow_radius(run.stats), l), guard);

  SchemeStepOptions opts;
  opts.guard_bound = guard;
  opts.compensated = cfg.compensated;
  SchemeYResult y = step_scheme_y(flow, path, cfg.x0, cfg.n, opts);
  run.y_nn = std::move(y.nodes);

  const std::size_t q = path.steps / static_cast<std::size_t>(cfg.n);
  run.x_n.kind = TrajectoryKind::x_n;
  run.x_n.provenance = run.y_nn.provenance;
  run.x_n.times = run.y_nn.times;
  run.x_n.values.resize(run.y_nn.values.size());
  for (std::size_t k = 0; k < run.y_nn.values.size(); ++k) {
    run.x_n.values[k] = flow.psi(run.y_nn.values[k], path.values[k * q]);
  }
  return run;
}

SchemeRun solve_x_scheme(const SchemeConfig& cfg) {
  validate(cfg);
  const CoefficientPair coeffs = make_coefficients(cfg.coeffs);
  const auto steps = static_cast<std::size_t>(cfg.n) * static_cast<std::size_t>(cfg.q);
  const FbmPath path = generate_path(cfg.generator, steps, cfg.horizon, cfg.hurst, cfg.seed);
  return solve_x_scheme_on(coeffs, path, cfg);
}

ReferenceRun solve_x_reference_on(const CoefficientPair& coeffs, const FbmPath& path, double x0,
                                  double tol) {
  ReferenceRun ref;
  ref.y = integrate_y_exact(coeffs, path, x0, tol);
  ref.x_fine.kind = TrajectoryKind::x_exact;
  ref.x_fine.provenance = ref.y.provenance;
  ref.x_fine.times = path.times;
  ref.x_fine.values.resize(path.values.size());
  const double inner = std::max(tol / 10.0, 1e-13);
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    ref.x_fine.values[i] = solve_phi_reference(coeffs, ref.y.values[i], path.values[i], inner);
  }
  return ref;
}

Trajectory solve_x_reference(const SchemeConfig& cfg) {
  validate(cfg);
  const CoefficientPair coeffs = make_coefficients(cfg.coeffs);
  const auto steps = static_cast<std::size_t>(cfg.n) * static_cast<std::size_t>(cfg.q);
  const FbmPath path = generate_path(cfg.generator, steps, cfg.horizon, cfg.hurst, cfg.seed);
  ReferenceRun ref = solve_x_reference_on(coeffs, path, cfg.x0, cfg.oracle_tol);
  Trajectory out = restrict_to(ref.x_fine, static_cast<std::size_t>(cfg.q));
  out.provenance.n = cfg.n;
  out.provenance.q = cfg.q;
  return out;
}

Trajectory restrict_to(const Trajectory& traj, std::size_t stride) {
  if (stride == 0 || traj.times.empty() || (traj.times.size() - 1) % stride != 0) {
    throw DomainError("restriction stride does not divide the trajectory grid");
  }
  Trajectory out;
  out.kind = traj.kind;
  out.provenance = traj.provenance;
  for (std::size_t i = 0; i < traj.times.size(); i += stride) {
    out.times.push_back(traj.times[i]);
    out.values.push_back(traj.values[i]);
  }
  return out;
}

double sup_error(const Trajectory& a, const Trajectory& b) {
  if (a.times.size() != b.times.size() || a.values.size() != a.times.size() ||
      b.values.size() != b.times.size()) {
    throw DomainError("sup_error: trajectories have different grids");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    const double scale = std::max({1.0, std::abs(a.times[i]), std::abs(b.times[i])});
    if (std::abs(a.times[i] - b.times[i]) > 1e-12 * scale) {
      char msg[128];
      std::snprintf(msg, sizeof msg, "sup_error: time grids differ at node %zu", i);
      throw DomainError(msg);
    }
    worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  }
  return worst;
}

}  // namespace dossfbm
