#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace zk {

/// Bad parameters or inputs that violate a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Initial data that does not satisfy u|_boundary = 0 and u_x(L) = 0.
class CompatibilityError : public std::runtime_error {
 public:
  CompatibilityError(const std::string& what, double residual, double tolerance)
      : std::runtime_error(what), residual_(residual), tolerance_(tolerance) {}

  double residual() const noexcept { return residual_; }
  double tolerance() const noexcept { return tolerance_; }

 private:
  double residual_;
  double tolerance_;
};

/// Picard iteration failed to reach its tolerance.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), residuals_(std::move(residuals)) {}

  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wraps a solver failure with the simulation time at which it happened.
class StepError : public std::runtime_error {
 public:
  StepError(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace zk
