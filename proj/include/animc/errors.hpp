#pragma once

#include <stdexcept>
#include <string>

namespace animc {

// Base for all library failures. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data: non-binary masks, inconsistent n, uncovered instances.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Non-conforming matrix shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Parameter outside its mathematical domain (theta <= 0, r > 2, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Linear system could not be solved even after the ridge retry.
class SolverError : public Error {
 public:
  using Error::Error;
};

// Non-finite value produced during an objective evaluation or fit.
class NumericError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline std::string shape(long rows, long cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace detail
}  // namespace animc
