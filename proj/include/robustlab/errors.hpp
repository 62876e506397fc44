#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace robustlab {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: dimension mismatch, invalid parameter, kernel mismatch.
class InputError : public Error {
 public:
  using Error::Error;
};

/// The requested operation is not defined for the given object
/// (second derivative of hinge, influence at a boundary solution, ...).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Problem size exceeds a configured cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Linear system singular beyond the diagonal jitter.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver hit its iteration limit. Carries the last iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, Eigen::VectorXd last_coeffs,
                   double last_residual)
      : Error(what),
        last_coeffs_(std::move(last_coeffs)),
        last_residual_(last_residual) {}

  const Eigen::VectorXd& last_coeffs() const { return last_coeffs_; }
  double last_residual() const { return last_residual_; }

 private:
  Eigen::VectorXd last_coeffs_;
  double last_residual_;
};

}  // namespace robustlab
