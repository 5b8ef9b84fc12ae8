#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace entropic {

/// Malformed input: bad shapes, rows that do not sum to one, unknown config keys.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for numerical failures (overflow, non-convergence, non-finite parameters).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double residual)
      : NumericalError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class OverflowError : public NumericalError {
 public:
  OverflowError(const std::string& what, std::size_t state)
      : NumericalError(what), state_(state) {}
  std::size_t state() const noexcept { return state_; }

 private:
  std::size_t state_;
};

/// Raised when trajectory enumeration would exceed its configured budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A continuous action left its admissible interval.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace entropic
