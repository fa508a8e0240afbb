#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace dossfbm {

enum class FbmGenerator { cholesky, circulant };

std::string_view to_string(FbmGenerator g);
FbmGenerator parse_generator(std::string_view name);

inline constexpr std::size_t kCholeskyCap = 4096;

/// Sampled fractional Brownian motion on the uniform grid t_i = i*T/N.
/// values[0] is exactly zero. Treat as immutable once generated; copies are
/// cheap enough to hand to worker threads.
struct FbmPath {
  double hurst = 0.5;
  double horizon = 1.0;
  std::size_t steps = 0;
  std::vector<double> times;
  std::vector<double> values;
  std::uint64_t seed = 0;
  FbmGenerator generator = FbmGenerator::circulant;

  double dt() const { return horizon / static_cast<double>(steps); }

  /// Keep every `stride`-th node. `steps` must be divisible by `stride`.
  FbmPath subsample(std::size_t stride) const;

  /// Value at an arbitrary time, linear between grid nodes.
  double interpolate(double t) const;
};

struct PathStats {
  double sup_norm = 0.0;
  double holder_norm = 0.0;
  double rho = 0.0;
  double hurst = 0.0;

  double holder_exponent() const { return hurst - rho; }
};

/// E[B_s B_t] = (t^{2H} + s^{2H} - |t-s|^{2H}) / 2.
double covariance(double s, double t, double hurst);

/// Autocovariance of unit-step fractional Gaussian noise at integer lag k.
double fgn_autocovariance(std::size_t lag, double hurst);

/// Exact sampler: Cholesky factor of the fGn Toeplitz covariance. The factor
/// for each (N, H) is computed once and shared between calls.
FbmPath generate_cholesky(std::size_t steps, double horizon, double hurst,
                          std::uint64_t seed, std::size_t cap = kCholeskyCap);

/// Exact sampler by circulant embedding (Davies-Harte) of fGn, O(N log N).
FbmPath generate_circulant(std::size_t steps, double horizon, double hurst,
                           std::uint64_t seed);

FbmPath generate_path(FbmGenerator generator, std::size_t steps, double horizon,
                      double hurst, std::uint64_t seed);

/// Discrete sup norm and (H - rho)-Hoelder quotient over all grid pairs.
PathStats path_stats(const FbmPath& path, double rho);

/// CSV with header `t,B`, 17 significant digits.
void write_path_csv(std::ostream& os, const FbmPath& path);

}  // namespace dossfbm
