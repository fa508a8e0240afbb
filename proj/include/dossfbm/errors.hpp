#pragma once

#include <stdexcept>
#include <string>

namespace dossfbm {

// Argument outside the mathematical domain of an operation (bad Hurst index,
// |u| outside the flow box, rho >= H, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical procedure failed: factorization breakdown, negative circulant
// eigenvalue, step-size underflow, overflow of a constant, trajectory blow-up.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or usage. `field` names the offending key when known.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& msg, std::string field = {})
      : std::invalid_argument(msg), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace dossfbm
