#include "dossfbm/fbm.hpp"

#include <fftw3.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <random>
#include <string>
#include <utility>

#include "dossfbm/errors.hpp"

namespace dossfbm {

namespace {

void check_hurst(double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) {
    throw DomainError("hurst must lie in (0,1), got " + std::to_string(hurst));
  }
}

void check_grid(std::size_t steps, double horizon) {
  if (steps == 0) throw DomainError("grid size must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("horizon must be positive and finite");
  }
}

// One engine per path; seed words split so nearby seeds give unrelated streams.
std::mt19937_64 make_engine(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32), 0x5eedu};
  return std::mt19937_64(seq);
}

FbmPath make_path(std::size_t steps, double horizon, double hurst, std::uint64_t seed,
                  FbmGenerator gen) {
  FbmPath p;
  p.hurst = hurst;
  p.horizon = horizon;
  p.steps = steps;
  p.seed = seed;
  p.generator = gen;
  p.times.resize(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    p.times[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
  }
  p.values.assign(steps + 1, 0.0);
  return p;
}

void accumulate_increments(FbmPath& p, const std::vector<double>& unit_increments) {
  const double scale = std::pow(p.dt(), p.hurst);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.steps; ++i) {
    acc += scale * unit_increments[i];
    p.values[i + 1] = acc;
  }
}

using Key = std::pair<std::size_t, double>;

// Lower Cholesky factor of the unit-step fGn covariance, row-major packed as
// a full N x N matrix.
std::shared_ptr<const std::vector<double>> cholesky_factor(std::size_t n, double hurst) {
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const std::vector<double>>> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find({n, hurst}); it != cache.end()) return it->second;
  }
  auto mat = std::make_shared<std::vector<double>>(n * n, 0.0);
  std::vector<double> gamma(n);
  for (std::size_t k = 0; k < n; ++k) gamma[k] = fgn_autocovariance(k, hurst);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) (*mat)[i * n + j] = gamma[i - j];
  }
  const lapack_int info = LAPACKE_dpotrf(LAPACK_ROW_MAJOR, 'L', static_cast<lapack_int>(n),
                                         mat->data(), static_cast<lapack_int>(n));
  if (info > 0) {
    throw NumericError("fGn covariance not numerically positive definite: pivot " +
                       std::to_string(info) + " failed");
  }
  if (info < 0) throw NumericError("dpotrf argument error " + std::to_string(info));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) (*mat)[i * n + j] = 0.0;
  }
  std::lock_guard lock(mu);
  if (cache.size() >= 8) cache.erase(cache.begin());
  cache.emplace(Key{n, hurst}, mat);
  return mat;
}

std::mutex& fftw_mutex() {
  static std::mutex mu;
  return mu;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

FftwBuffer fftw_buffer(std::size_t m) {
  return FftwBuffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * m)));
}

// Forward DFT in place. Planning is not thread safe in FFTW; execution is.
void forward_dft(fftw_complex* data, std::size_t m) {
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(m), data, data, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(fftw_mutex());
  fftw_destroy_plan(plan);
}

// Eigenvalues of the 2N circulant embedding of unit-step fGn.
std::shared_ptr<const std::vector<double>> circulant_eigenvalues(std::size_t n, double hurst) {
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const std::vector<double>>> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find({n, hurst}); it != cache.end()) return it->second;
  }
  const std::size_t m = 2 * n;
  auto buf = fftw_buffer(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t lag = j <= n ? j : m - j;
    buf[j][0] = fgn_autocovariance(lag, hurst);
    buf[j][1] = 0.0;
  }
  forward_dft(buf.get(), m);
  auto eig = std::make_shared<std::vector<double>>(m);
  double most_negative = 0.0;
  double largest = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    (*eig)[k] = buf[k][0];
    most_negative = std::min(most_negative, buf[k][0]);
    largest = std::max(largest, buf[k][0]);
  }
  // Roundoff-level negatives are clipped; anything larger is a bug.
  if (most_negative < -1e-10 * std::max(1.0, largest)) {
    char msg[128];
    std::snprintf(msg, sizeof msg, "circulant embedding has negative eigenvalue %.6e",
                  most_negative);
    throw NumericError(msg);
  }
  for (double& v : *eig) v = std::max(v, 0.0);
  std::lock_guard lock(mu);
  if (cache.size() >= 16) cache.erase(cache.begin());
  cache.emplace(Key{n, hurst}, eig);
  return eig;
}

}  // namespace

std::string_view to_string(FbmGenerator g) {
  return g == FbmGenerator::cholesky ? "cholesky" : "circulant";
}

FbmGenerator parse_generator(std::string_view name) {
  if (name == "cholesky") return FbmGenerator::cholesky;
  if (name == "circulant") return FbmGenerator::circulant;
  throw ConfigError("unknown fBm generator '" + std::string(name) + "'", "generator");
}

FbmPath FbmPath::subsample(std::size_t stride) const {
  if (stride == 0 || steps % stride != 0) {
    throw DomainError("subsample stride " + std::to_string(stride) +
                      " does not divide grid size " + std::to_string(steps));
  }
  FbmPath out = *this;
  out.steps = steps / stride;
  out.times.resize(out.steps + 1);
  out.values.resize(out.steps + 1);
  for (std::size_t i = 0; i <= out.steps; ++i) {
    out.times[i] = times[i * stride];
    out.values[i] = values[i * stride];
  }
  return out;
}

double FbmPath::interpolate(double t) const {
  if (t <= 0.0) return values.front();
  if (t >= horizon) return values.back();
  const double x = t / dt();
  auto i = static_cast<std::size_t>(x);
  if (i >= steps) i = steps - 1;
  const double w = x - static_cast<double>(i);
  return values[i] + w * (values[i + 1] - values[i]);
}

double covariance(double s, double t, double hurst) {
  check_hurst(hurst);
  if (!(s >= 0.0) || !(t >= 0.0) || !std::isfinite(s) || !std::isfinite(t)) {
    throw DomainError("covariance requires finite nonnegative times");
  }
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(t, h2) + std::pow(s, h2) - std::pow(std::abs(t - s), h2));
}

double fgn_autocovariance(std::size_t lag, double hurst) {
  const double k = static_cast<double>(lag);
  const double h2 = 2.0 * hurst;
  if (lag == 0) return 1.0;
  return 0.5 * (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) + std::pow(k - 1.0, h2));
}

FbmPath generate_cholesky(std::size_t steps, double horizon, double hurst, std::uint64_t seed,
                          std::size_t cap) {
  check_hurst(hurst);
  check_grid(steps, horizon);
  if (steps > cap) {
    throw DomainError("cholesky generator limited to N <= " + std::to_string(cap) +
                      "; use the circulant generator");
  }
  const auto factor = cholesky_factor(steps, hurst);
  auto engine = make_engine(seed);
  std::normal_distribution<double> normal;
  std::vector<double> z(steps);
  for (double& v : z) v = normal(engine);
  std::vector<double> incr(steps, 0.0);
  const double* l = factor->data();
  for (std::size_t i = 0; i < steps; ++i) {
    double acc = 0.0;
    const double* row = l + i * steps;
    for (std::size_t j = 0; j <= i; ++j) acc += row[j] * z[j];
    incr[i] = acc;
  }
  FbmPath p = make_path(steps, horizon, hurst, seed, FbmGenerator::cholesky);
  accumulate_increments(p, incr);
  return p;
}

FbmPath generate_circulant(std::size_t steps, double horizon, double hurst,
                           std::uint64_t seed) {
  check_hurst(hurst);
  check_grid(steps, horizon);
  const auto eig = circulant_eigenvalues(steps, hurst);
  const std::size_t m = 2 * steps;
  auto engine = make_engine(seed);
  std::normal_distribution<double> normal;
  auto buf = fftw_buffer(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double a = std::sqrt((*eig)[k] / static_cast<double>(m));
    buf[k][0] = a * normal(engine);
    buf[k][1] = a * normal(engine);
  }
  forward_dft(buf.get(), m);
  // Real part of the transform has exactly the circulant covariance.
  std::vector<double> incr(steps);
  for (std::size_t i = 0; i < steps; ++i) incr[i] = buf[i][0];
  FbmPath p = make_path(steps, horizon, hurst, seed, FbmGenerator::circulant);
  accumulate_increments(p, incr);
  return p;
}

FbmPath generate_path(FbmGenerator generator, std::size_t steps, double horizon, double hurst,
                      std::uint64_t seed) {
  return generator == FbmGenerator::cholesky ? generate_cholesky(steps, horizon, hurst, seed)
                                             : generate_circulant(steps, horizon, hurst, seed);
}

PathStats path_stats(const FbmPath& path, double rho) {
  if (!(rho > 0.0) || !(rho < path.hurst)) {
    throw DomainError("rho must lie in (0, hurst)");
  }
  PathStats st;
  st.rho = rho;
  st.hurst = path.hurst;
  for (double v : path.values) st.sup_norm = std::max(st.sup_norm, std::abs(v));

  // Uniform grid: the denominator depends only on the lag.
  const std::size_t n = path.steps;
  const double alpha = path.hurst - rho;
  std::vector<double> inv_lag(n + 1, 0.0);
  for (std::size_t d = 1; d <= n; ++d) {
    inv_lag[d] = 1.0 / std::pow(static_cast<double>(d) * path.dt(), alpha);
  }
  const double* v = path.values.data();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double vi = v[i];
    for (std::size_t j = i + 1; j <= n; ++j) {
      best = std::max(best, std::abs(v[j] - vi) * inv_lag[j - i]);
    }
  }
  st.holder_norm = best;
  return st;
}

void write_path_csv(std::ostream& os, const FbmPath& path) {
  os << "t,B\n";
  char line[96];
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", path.times[i], path.values[i]);
    os << line;
  }
}

}  // namespace dossfbm
