#include "dossfbm/flow.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <cstdio>
#include <string>

#include "dossfbm/errors.hpp"

namespace dossfbm {

namespace {

std::string describe(double z, double u) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(z=%.17g, u=%.17g)", z, u);
  return buf;
}

}  // namespace

FlowPartition::FlowPartition(double radius, int level) : radius_(radius), level_(level) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw DomainError("partition radius must be positive and finite");
  }
  if (level < 1) throw DomainError("partition level must be positive");
  nodes_.resize(static_cast<std::size_t>(2 * level + 1));
  for (int i = 0; i <= level; ++i) {
    const double u = i == level ? radius : static_cast<double>(i) * radius / level;
    nodes_[static_cast<std::size_t>(level + i)] = u;
    nodes_[static_cast<std::size_t>(level - i)] = -u;
  }
}

namespace {

// Smallest i in [-l, l] with node(i) >= u (u inside the box).
int first_ge(const FlowPartition& p, double u) {
  const int l = p.level();
  int i = static_cast<int>(std::ceil(u / p.step()));
  i = std::clamp(i, -l, l);
  while (i > -l && p.node(i - 1) >= u) --i;
  while (i < l && p.node(i) < u) ++i;
  return i;
}

// Smallest i with node(i) > u; u < R.
int first_gt(const FlowPartition& p, double u) {
  int i = first_ge(p, u);
  if (p.node(i) == u) ++i;
  return i;
}

// Largest i with node(i) <= u; u >= -R.
int last_le(const FlowPartition& p, double u) {
  int i = first_ge(p, u);
  if (p.node(i) > u) --i;
  return i;
}

}  // namespace

int FlowPartition::anchor(double u) const {
  if (u > 0.0) return first_ge(*this, u) - 1;
  if (u < 0.0) return first_gt(*this, u);
  return 0;
}

int FlowPartition::anchor_left(double u) const {
  if (u <= -radius_) return anchor_right(u);
  if (u > 0.0) return first_ge(*this, u) - 1;
  return first_ge(*this, u);
}

int FlowPartition::anchor_right(double u) const {
  if (u >= radius_) return anchor_left(u);
  if (u >= 0.0) return last_le(*this, u);
  return first_gt(*this, u);
}

FlowPartition build_partition(double radius, int level) { return FlowPartition(radius, level); }

PiecewiseFlow::PiecewiseFlow(CoefficientPair coeffs, FlowPartition partition,
                             double truncation_M, std::size_t cache_capacity)
    : coeffs_(std::move(coeffs)),
      partition_(std::move(partition)),
      truncation_M_(truncation_M),
      capacity_(std::max<std::size_t>(cache_capacity, 1)) {
  if (!(truncation_M > 0.0)) throw DomainError("truncation bound M must be positive");
}

void PiecewiseFlow::check_domain(double z, double u) const {
  if (!(std::abs(u) <= partition_.radius())) {
    throw DomainError("flow queried outside [-R, R] at " + describe(z, u));
  }
  if (!(std::abs(z) <= truncation_M_)) {
    throw DomainError("flow start point outside [-M, M] at " + describe(z, u));
  }
}

std::shared_ptr<const PsiNodes> PiecewiseFlow::compute_psi_nodes(double z) const {
  const int l = partition_.level();
  const auto& u = partition_.nodes();
  const auto size = static_cast<std::size_t>(2 * l + 1);
  auto out = std::make_shared<PsiNodes>();
  out->psi.resize(size);
  out->sigma.resize(size);
  out->sigma_dsigma.resize(size);
  auto fill = [&](std::size_t i, double value) {
    out->psi[i] = value;
    const double s = coeffs_.sigma(value);
    out->sigma[i] = s;
    out->sigma_dsigma[i] = s * coeffs_.dsigma(value);
  };
  const auto c = static_cast<std::size_t>(l);
  fill(c, z);
  // Same expression as psi_in_cell so that evaluations at nodes are exact.
  for (std::size_t i = c + 1; i < size; ++i) {
    const double v = u[i] - u[i - 1];
    fill(i, out->psi[i - 1] + v * (out->sigma[i - 1] + 0.5 * out->sigma_dsigma[i - 1] * v));
  }
  for (std::size_t i = c; i-- > 0;) {
    const double v = u[i] - u[i + 1];
    fill(i, out->psi[i + 1] + v * (out->sigma[i + 1] + 0.5 * out->sigma_dsigma[i + 1] * v));
  }
  return out;
}

double PiecewiseFlow::phi_cell(double anchor_value, double a, double u) const {
  const double s = coeffs_.sigma(anchor_value);
  auto integrand = [&](double r) { return coeffs_.sigma(anchor_value + (r - a) * s); };
  return anchor_value + boost::math::quadrature::gauss<double, 8>::integrate(integrand, a, u);
}

std::shared_ptr<const std::vector<double>> PiecewiseFlow::compute_phi_nodes(double z) const {
  const int l = partition_.level();
  const auto& u = partition_.nodes();
  const auto size = static_cast<std::size_t>(2 * l + 1);
  auto out = std::make_shared<std::vector<double>>(size);
  const auto c = static_cast<std::size_t>(l);
  (*out)[c] = z;
  for (std::size_t i = c + 1; i < size; ++i) (*out)[i] = phi_cell((*out)[i - 1], u[i - 1], u[i]);
  for (std::size_t i = c; i-- > 0;) (*out)[i] = phi_cell((*out)[i + 1], u[i + 1], u[i]);
  return out;
}

PiecewiseFlow::Entry& PiecewiseFlow::touch(double z) const {
  const auto key = std::bit_cast<std::uint64_t>(z);
  if (auto it = cache_.find(key); it != cache_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second.second);
    return it->second.first;
  }
  if (cache_.size() >= capacity_) {
    cache_.erase(lru_.back());
    lru_.pop_back();
  }
  lru_.push_front(key);
  auto [it, inserted] = cache_.emplace(key, std::make_pair(Entry{}, lru_.begin()));
  return it->second.first;
}

std::shared_ptr<const PsiNodes> PiecewiseFlow::psi_nodes(double z) const {
  {
    std::lock_guard lock(mu_);
    Entry& e = touch(z);
    if (e.psi) return e.psi;
  }
  auto computed = compute_psi_nodes(z);
  std::lock_guard lock(mu_);
  Entry& e = touch(z);
  if (!e.psi) e.psi = computed;
  return e.psi;
}

std::shared_ptr<const std::vector<double>> PiecewiseFlow::phi_nodes(double z) const {
  {
    std::lock_guard lock(mu_);
    Entry& e = touch(z);
    if (e.phi) return e.phi;
  }
  auto computed = compute_phi_nodes(z);
  std::lock_guard lock(mu_);
  Entry& e = touch(z);
  if (!e.phi) e.phi = computed;
  return e.phi;
}

std::size_t PiecewiseFlow::cache_size() const {
  std::lock_guard lock(mu_);
  return cache_.size();
}

double PiecewiseFlow::psi(double z, double u) const {
  check_domain(z, u);
  if (u == 0.0) return z;
  const auto nodes = psi_nodes(z);
  return psi_in_cell(*nodes, partition_, partition_.anchor(u), u);
}

double PiecewiseFlow::phi_l(double z, double u) const {
  check_domain(z, u);
  if (u == 0.0) return z;
  const auto nodes = phi_nodes(z);
  const int a = partition_.anchor(u);
  return phi_cell((*nodes)[static_cast<std::size_t>(a + partition_.level())], partition_.node(a),
                  u);
}

double PiecewiseFlow::psi_du(double z, double u, Side side) const {
  check_domain(z, u);
  const auto nodes = psi_nodes(z);
  const int a = side == Side::left ? partition_.anchor_left(u) : partition_.anchor_right(u);
  const auto i = static_cast<std::size_t>(a + partition_.level());
  return nodes->sigma[i] + nodes->sigma_dsigma[i] * (u - partition_.node(a));
}

namespace {

template <std::size_t Dim, class System>
std::array<double, Dim> integrate_flow(System&& sys, std::array<double, Dim> state, double u,
                                       double tol) {
  namespace ode = boost::numeric::odeint;
  if (!(tol >= 1e-13)) throw DomainError("reference flow tolerance must be >= 1e-13");
  if (!std::isfinite(u)) throw DomainError("reference flow horizon must be finite");
  if (u == 0.0) return state;
  using Stepper = ode::runge_kutta_fehlberg78<std::array<double, Dim>>;
  const double dt0 = std::copysign(std::min(std::abs(u), 0.125), u);
  try {
    ode::integrate_adaptive(ode::make_controlled<Stepper>(tol, tol), sys, state, 0.0, u, dt0);
  } catch (const std::exception& e) {
    throw NumericError(std::string("reference flow integration failed: ") + e.what());
  }
  for (double v : state) {
    if (!std::isfinite(v)) throw NumericError("reference flow produced a non-finite value");
  }
  return state;
}

}  // namespace

double solve_phi_reference(const CoefficientPair& coeffs, double z, double u, double tol) {
  auto sys = [&](const std::array<double, 1>& x, std::array<double, 1>& dx, double) {
    dx[0] = coeffs.sigma(x[0]);
  };
  return integrate_flow<1>(sys, {z}, u, tol)[0];
}

FlowWithLogJacobian solve_phi_with_jacobian(const CoefficientPair& coeffs, double z, double u,
                                            double tol) {
  auto sys = [&](const std::array<double, 2>& x, std::array<double, 2>& dx, double) {
    dx[0] = coeffs.sigma(x[0]);
    dx[1] = coeffs.dsigma(x[0]);
  };
  const auto r = integrate_flow<2>(sys, {z, 0.0}, u, tol);
  return {r[0], r[1]};
}

}  // namespace dossfbm
