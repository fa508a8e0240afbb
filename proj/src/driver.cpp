#include "dossfbm/driver.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>

#include "dossfbm/errors.hpp"

namespace dossfbm {

std::string_view to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::y_exact: return "Y_exact";
    case TrajectoryKind::y_l: return "Y_l";
    case TrajectoryKind::y_nn: return "Y_nn";
    case TrajectoryKind::x_exact: return "X_exact";
    case TrajectoryKind::x_n: return "X_n";
  }
  return "unknown";
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const auto& p = traj.provenance;
  char line[128];
  os << "# kind=" << to_string(traj.kind) << '\n';
  os << "# coeffs=" << p.coeffs_tag << '\n';
  os << "# seed=" << p.path_seed << '\n';
  os << "# n=" << p.n << " l=" << p.l << " q=" << p.q << '\n';
  std::snprintf(line, sizeof line, "# tol=%.17g\n", p.tol);
  os << line;
  os << "t,value\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", traj.times[i], traj.values[i]);
    os << line;
  }
}

DriftValue drift(const PiecewiseFlow& flow, double u, double z) {
  flow.check_domain(z, u);
  const auto& part = flow.partition();
  const auto& coeffs = flow.coeffs();
  const auto nodes = flow.psi_nodes(z);
  const int l = part.level();

  double q = 0.0;
  if (u != 0.0) {
    const int last = part.anchor(u);
    const int dir = u > 0.0 ? 1 : -1;
    for (int a = 0;; a += dir) {
      const bool partial = a == last;
      const double from = part.node(a);
      const double to = partial ? u : part.node(a + dir);
      auto integrand = [&](double r) {
        return coeffs.dsigma(PiecewiseFlow::psi_in_cell(*nodes, part, a, r));
      };
      q += boost::math::quadrature::gauss<double, 4>::integrate(integrand, from, to);
      if (partial) break;
    }
  }

  const double psi_u = PiecewiseFlow::psi_in_cell(*nodes, part, part.anchor(u), u);
  const int ar = part.anchor_right(u);
  const auto ir = static_cast<std::size_t>(ar + l);
  const double dpsi = nodes->sigma[ir] + nodes->sigma_dsigma[ir] * (u - part.node(ar));

  DriftValue out;
  out.weight = std::exp(-q);
  out.g = out.weight * coeffs.b(psi_u);
  out.h1 = -out.g * coeffs.dsigma(psi_u) + out.weight * coeffs.db(psi_u) * dpsi;
  return out;
}

double drift_g(const PiecewiseFlow& flow, double u, double z) { return drift(flow, u, z).g; }

double drift_h1(const PiecewiseFlow& flow, double u, double z) { return drift(flow, u, z).h1; }

double exact_drift(const CoefficientPair& coeffs, double z, double u, double tol) {
  const auto r = solve_phi_with_jacobian(coeffs, z, u, tol);
  return std::exp(-r.log_jacobian) * coeffs.b(r.phi);
}

namespace {

using Rhs = std::function<double(double y, double b)>;

// RK4 across part of one cell where B is linear: theta in [th0, th0 + m*d].
double rk4_substeps(const Rhs& f, double y, double k_first, double b0, double db, double h,
                    int m) {
  const double d = 1.0 / m;
  for (int s = 0; s < m; ++s) {
    const double th = s * d;
    const double hs = h * d;
    const double bm = b0 + (th + 0.5 * d) * db;
    const double be = b0 + (th + d) * db;
    const double k1 = s == 0 ? k_first : f(y, b0 + th * db);
    const double k2 = f(y + 0.5 * hs * k1, bm);
    const double k3 = f(y + 0.5 * hs * k2, bm);
    const double k4 = f(y + hs * k3, be);
    y += hs * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
  }
  return y;
}

Trajectory integrate_on_path(const Rhs& f, const FbmPath& path, double x0, double tol,
                             const OdeOptions& opts) {
  if (!(tol > 0.0)) throw DomainError("integration tolerance must be positive");
  Trajectory out;
  out.times = path.times;
  out.values.resize(path.times.size());
  out.values[0] = x0;
  double y = x0;
  for (std::size_t i = 0; i < path.steps; ++i) {
    const double h = path.times[i + 1] - path.times[i];
    const double b0 = path.values[i];
    const double db = path.values[i + 1] - b0;
    const double budget = tol * h / path.horizon;
    const double k_first = f(y, b0);
    double coarse = rk4_substeps(f, y, k_first, b0, db, h, 1);
    int m = 2;
    double fine = rk4_substeps(f, y, k_first, b0, db, h, m);
    int halvings = 1;
    while (std::abs(fine - coarse) / 15.0 > budget + 1e-16 * std::abs(fine)) {
      if (++halvings > opts.max_halvings) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "RK4 step doubling did not reach tolerance %.3e in cell %zu", tol, i);
        throw NumericError(msg);
      }
      coarse = fine;
      m *= 2;
      fine = rk4_substeps(f, y, k_first, b0, db, h, m);
    }
    y = fine;
    if (!std::isfinite(y)) throw NumericError("Y integration produced a non-finite value");
    out.values[i + 1] = y;
  }
  return out;
}

}  // namespace

Trajectory integrate_y_exact(const CoefficientPair& coeffs, const FbmPath& path, double x0,
                             double tol, const OdeOptions& opts) {
  const double inner = std::max(tol / 10.0, 1e-13);
  Rhs f = [&](double y, double b) { return exact_drift(coeffs, y, b, inner); };
  Trajectory out = integrate_on_path(f, path, x0, tol, opts);
  out.kind = TrajectoryKind::y_exact;
  out.provenance = {coeffs.tag(), path.seed, 0, 0, 0, tol};
  return out;
}

Trajectory integrate_y_l(const PiecewiseFlow& flow, const FbmPath& path, double x0, double tol,
                         const OdeOptions& opts) {
  Rhs f = [&](double y, double b) { return drift(flow, b, y).g; };
  Trajectory out = integrate_on_path(f, path, x0, tol, opts);
  out.kind = TrajectoryKind::y_l;
  out.provenance = {flow.coeffs().tag(), path.seed, 0, flow.partition().level(), 0, tol};
  return out;
}

SchemeYResult step_scheme_y(const PiecewiseFlow& flow, const FbmPath& path, double x0, int n,
                            const SchemeStepOptions& opts) {
  if (n < 1) throw DomainError("scheme resolution n must be positive");
  const auto nn = static_cast<std::size_t>(n);
  if (path.steps % nn != 0) {
    throw DomainError("path grid size " + std::to_string(path.steps) +
                      " is not a multiple of n = " + std::to_string(n));
  }
  const std::size_t q = path.steps / nn;

  SchemeYResult res;
  res.nodes.kind = res.fine.kind = TrajectoryKind::y_nn;
  res.nodes.provenance = {flow.coeffs().tag(), path.seed, n, flow.partition().level(),
                          static_cast<int>(q), 0.0};
  res.fine.provenance = res.nodes.provenance;
  res.nodes.times.resize(nn + 1);
  res.nodes.values.resize(nn + 1);
  res.fine.times = path.times;
  res.fine.values.resize(path.times.size());

  double y = x0;
  double carry = 0.0;
  res.nodes.times[0] = path.times[0];
  res.nodes.values[0] = y;
  res.fine.values[0] = y;
  const double* b = path.values.data();
  const double* t = path.times.data();
  for (std::size_t k = 0; k < nn; ++k) {
    const std::size_t base = k * q;
    const double bk = b[base];
    const DriftValue dv = drift(flow, bk, y);
    // Running trapezoid integral of (B_s - B_{t_k}) over the sub-nodes.
    double integral = 0.0;
    for (std::size_t j = 0; j < q; ++j) {
      const double width = t[base + j + 1] - t[base + j];
      integral += 0.5 * width * ((b[base + j] - bk) + (b[base + j + 1] - bk));
      const double elapsed = t[base + j + 1] - t[base];
      res.fine.values[base + j + 1] = y + elapsed * dv.g + dv.h1 * integral;
    }
    const double increment = (t[base + q] - t[base]) * dv.g + dv.h1 * integral;
    if (opts.compensated) {
      const double adj = increment - carry;
      const double next = y + adj;
      carry = (next - y) - adj;
      y = next;
    } else {
      y += increment;
    }
    if (!(std::abs(y) <= opts.guard_bound)) {
      char msg[160];
      std::snprintf(msg, sizeof msg, "Y^{n,n} left the guard box |Y| <= %.6g at step %zu (Y=%.6g)",
                    opts.guard_bound, k + 1, y);
      throw NumericError(msg);
    }
    res.fine.values[base + q] = y;
    res.nodes.times[k + 1] = t[base + q];
    res.nodes.values[k + 1] = y;
  }
  return res;
}

}  // namespace dossfbm
