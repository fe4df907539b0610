#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace svylasso {

/// Bad caller input: dimension mismatch, out-of-range parameter, malformed index set.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Data that cannot support the requested computation (single-class outcome,
/// separation, empty stratum).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: singular block, non-finite value, non-PD variance.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Truncation mass underflowed even in log space.
class TailDegenerateError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// The Lasso selected no slope, so there is no selected-model coefficient to
/// make inference on.
class SelectionDegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative solver ran out of iterations. Carries the last iterate.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, Eigen::VectorXd last_iterate)
      : NumericError(what), last_iterate_(std::move(last_iterate)) {}

  const Eigen::VectorXd& last_iterate() const noexcept { return last_iterate_; }

 private:
  Eigen::VectorXd last_iterate_;
};

}  // namespace svylasso
