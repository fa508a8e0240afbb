#pragma once

#include <cmath>
#include <vector>

namespace testing {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

inline Estimate sample_mean(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double m = 0.0;
  for (double v : x) m += v;
  m /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

/// Sample covariance with the standard error of the mean of the centred
/// products.
inline Estimate sample_covariance(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = sample_mean(x).value, my = sample_mean(y).value;
  std::vector<double> prod(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) prod[i] = (x[i] - mx) * (y[i] - my);
  return sample_mean(prod);
}

/// phi(x0, u) for sigma = cos: gd(u + gd^{-1}(x0)), gd(u) = 2 atan(tanh(u/2)).
/// Substituting: d/du gd(v) = sech(v) and cos(gd(v)) = sech(v).
inline double gudermann_flow(double x0, double u) {
  const double inv = 2.0 * std::atanh(std::tan(0.5 * x0));
  return 2.0 * std::atan(std::tanh(0.5 * (u + inv)));
}

}  // namespace testing
