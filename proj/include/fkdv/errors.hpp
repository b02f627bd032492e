#pragma once

#include <stdexcept>
#include <string>

namespace fkdv {

/// Invalid parameters: out-of-range alpha, degenerate grid, bad quadrature spec.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A quadrature or lattice sum failed to reach its tolerance.
class QuadratureError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The fixed-point iteration of a time step did not converge.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(const std::string& what, long step, double cfl_lambda)
      : std::runtime_error(what), step_(step), cfl_lambda_(cfl_lambda) {}

  long step() const noexcept { return step_; }
  double cfl_lambda() const noexcept { return cfl_lambda_; }

private:
  long step_;
  double cfl_lambda_;
};

/// A linear solve hit a singular matrix. Indicates an assembly bug.
class SingularMatrixError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace fkdv
