#pragma once

#include <stdexcept>
#include <string>

namespace gridforge {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested coefficient or operation needs more precision than available.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// Arguments outside the mathematical domain of an operation (bad level,
/// odd weight, non-invertible series, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Internal validation failed: a computed object contradicts frozen data or
/// a structural invariant. Reported by the CLI with exit code 3.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace gridforge
