#pragma once

#include <stdexcept>
#include <string>

namespace ahi {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A requested moment E[X^r] does not exist for the distribution.
class MomentExistenceError : public Error {
 public:
  using Error::Error;
};

// Population index is not defined (e.g. E[1/X] infinite).
class IndexUndefinedError : public Error {
 public:
  using Error::Error;
};

// Case the formulas do not cover (e.g. n*p == 0 in the GIG single integral).
class UnsupportedCaseError : public Error {
 public:
  using Error::Error;
};

// Overflow or loss of all significance in a closed-form evaluation.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// Invalid simulation or CLI configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Unreadable or invalid input data.
class DataError : public Error {
 public:
  using Error::Error;
};

// Numerical integration ran out of budget. Carries the best estimate so far.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_estimate,
                   double error_estimate)
      : Error(what),
        best_estimate_(best_estimate),
        error_estimate_(error_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

}  // namespace ahi
