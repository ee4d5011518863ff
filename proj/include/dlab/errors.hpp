#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dlab {

/// Base of every error raised by the library. The CLI maps subclasses of
/// `ValidationError` to exit code 1 and `NumericalError` to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Ill-formed input data (CSV, sampled profiles, manifests).
class DataError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Fields that should share a grid do not.
class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Integrand behaves like (x-a)^(-p) with p >= 1 at an endpoint.
class NonIntegrableError : public NumericalError {
 public:
  NonIntegrableError(const std::string& what, double exponent)
      : NumericalError(what), exponent_(exponent) {}
  double exponent() const noexcept { return exponent_; }

 private:
  double exponent_;
};

/// Refinement budget exhausted before the requested accuracy was met.
class AccuracyError : public NumericalError {
 public:
  AccuracyError(const std::string& what, double best_value, double error_estimate)
      : NumericalError(what), best_value_(best_value), error_estimate_(error_estimate) {}
  double best_value() const noexcept { return best_value_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_value_;
  double error_estimate_;
};

/// Time stepping produced a non-finite or exploding field.
class InstabilityError : public NumericalError {
 public:
  InstabilityError(const std::string& what, double last_good_time,
                   std::vector<std::complex<double>> last_good_frame)
      : NumericalError(what),
        last_good_time_(last_good_time),
        last_good_frame_(std::move(last_good_frame)) {}
  double last_good_time() const noexcept { return last_good_time_; }
  const std::vector<std::complex<double>>& last_good_frame() const noexcept {
    return last_good_frame_;
  }

 private:
  double last_good_time_;
  std::vector<std::complex<double>> last_good_frame_;
};

}  // namespace dlab
