#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <list>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "dossfbm/coeffs.hpp"

namespace dossfbm {

/// Uniform partition u_i = i*R/l, i = -l..l, of [-R, R].
class FlowPartition {
 public:
  FlowPartition(double radius, int level);

  double radius() const { return radius_; }
  int level() const { return level_; }
  double step() const { return radius_ / level_; }
  /// Node u_i for i in [-l, l].
  double node(int i) const { return nodes_[static_cast<std::size_t>(i + level_)]; }
  const std::vector<double>& nodes() const { return nodes_; }

  /// Index a of the anchor node for the cell used to evaluate at u.
  /// Left side: the cell containing (u - eps, u]; right side: [u, u + eps).
  /// For u > 0 the anchor is the cell's lower node, for u < 0 the upper node.
  /// At the box edges the only existing side is used.
  int anchor_left(double u) const;
  int anchor_right(double u) const;
  /// Cell used for plain evaluation: (u_{k-1}, u_k] for u > 0,
  /// [u_{k-1}, u_k) for u < 0.
  int anchor(double u) const;

 private:
  double radius_;
  int level_;
  std::vector<double> nodes_;
};

FlowPartition build_partition(double radius, int level);

enum class Side { left, right };

/// Node data of the piecewise Taylor flow started at one z: psi at every
/// node plus sigma and sigma*sigma' at psi, indexed by i + l.
struct PsiNodes {
  std::vector<double> psi;
  std::vector<double> sigma;
  std::vector<double> sigma_dsigma;
};

/// The level-l approximations of the Doss flow on [-M, M] x [-R, R]:
///  - psi:   closed-form piecewise first-order Taylor flow (the scheme's flow);
///  - phi_l: Euler-in-flow approximation with the cell integral by 8-point
///           Gauss-Legendre quadrature (used by the error analysis).
/// Queries outside the box raise DomainError. Per-z node arrays are cached
/// (LRU, bounded); the cache is internally locked so concurrent callers see
/// the same values as serial ones.
class PiecewiseFlow {
 public:
  static constexpr std::size_t default_cache_capacity = std::size_t{1} << 16;

  PiecewiseFlow(CoefficientPair coeffs, FlowPartition partition,
                double truncation_M = std::numeric_limits<double>::infinity(),
                std::size_t cache_capacity = default_cache_capacity);

  PiecewiseFlow(const PiecewiseFlow&) = delete;
  PiecewiseFlow& operator=(const PiecewiseFlow&) = delete;

  const CoefficientPair& coeffs() const { return coeffs_; }
  const FlowPartition& partition() const { return partition_; }
  double truncation_M() const { return truncation_M_; }

  double psi(double z, double u) const;
  double phi_l(double z, double u) const;
  /// One-sided u-derivative of psi(z, .).
  double psi_du(double z, double u, Side side) const;

  std::shared_ptr<const PsiNodes> psi_nodes(double z) const;
  std::shared_ptr<const std::vector<double>> phi_nodes(double z) const;

  /// psi(z, u) given the node data, anchored at index a (no checks).
  static double psi_in_cell(const PsiNodes& nodes, const FlowPartition& part, int a, double u) {
    const auto i = static_cast<std::size_t>(a + part.level());
    const double v = u - part.nodes()[i];
    return nodes.psi[i] + v * (nodes.sigma[i] + 0.5 * nodes.sigma_dsigma[i] * v);
  }

  /// Throws DomainError unless (z, u) lies in the closed box.
  void check_domain(double z, double u) const;

  std::size_t cache_size() const;

 private:
  struct Entry {
    std::shared_ptr<const PsiNodes> psi;
    std::shared_ptr<const std::vector<double>> phi;
  };

  std::shared_ptr<const PsiNodes> compute_psi_nodes(double z) const;
  std::shared_ptr<const std::vector<double>> compute_phi_nodes(double z) const;
  double phi_cell(double anchor_value, double a, double u) const;
  Entry& touch(double z) const;

  CoefficientPair coeffs_;
  FlowPartition partition_;
  double truncation_M_;
  std::size_t capacity_;

  mutable std::mutex mu_;
  mutable std::list<std::uint64_t> lru_;
  mutable std::unordered_map<std::uint64_t, std::pair<Entry, std::list<std::uint64_t>::iterator>>
      cache_;
};

/// Reference Doss flow phi(z, u): d phi / du = sigma(phi), phi(z, 0) = z,
/// adaptive Runge-Kutta-Fehlberg 7(8) with absolute and relative tolerance
/// `tol` (>= 1e-13). Negative u integrates backward. Global accuracy is
/// about 100 * tol * |u|.
double solve_phi_reference(const CoefficientPair& coeffs, double z, double u, double tol);

struct FlowWithLogJacobian {
  double phi = 0.0;
  /// Q = int_0^u sigma'(phi(z, s)) ds, so d phi / dz = exp(Q).
  double log_jacobian = 0.0;
};

/// phi together with Q, integrated as one augmented ODE.
FlowWithLogJacobian solve_phi_with_jacobian(const CoefficientPair& coeffs, double z, double u,
                                            double tol);

}  // namespace dossfbm
