#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace tensormp {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Magnitude cap applied when validating tau inputs; the limit theorems assume
// uniformly bounded tau sequences.
inline constexpr double kTauBound = 1e6;

// An iterative solver failed to reach its residual target.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// A quadrature did not meet the requested tolerance; carries the best
// available estimate so callers can report it.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate)
      : std::runtime_error(what), estimate_(estimate) {}
  double estimate() const { return estimate_; }

 private:
  double estimate_;
};

// Invalid user-facing configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tensormp
