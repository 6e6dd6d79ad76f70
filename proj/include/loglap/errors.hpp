#pragma once

#include <stdexcept>
#include <string>

namespace loglap {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Adaptive quadrature ran out of budget. Carries the best estimate so
/// callers that tolerate soft failures can still use it.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double best_estimate, double error_estimate)
      : std::runtime_error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

/// Integrand produced NaN or infinity at an interior node.
class NonFiniteIntegrand : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Least-squares design matrix is rank deficient.
class IllConditioned : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Test function declared rougher than Dini continuous.
class SmoothnessTooLow : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Kernel route requested for a dimension it does not support.
class RouteMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace loglap
