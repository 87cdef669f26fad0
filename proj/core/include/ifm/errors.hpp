#pragma once

#include <stdexcept>
#include <string>

namespace ifm {

/// Base of every error raised by the library. Messages are complete sentences
/// suitable for printing to the user.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested object would exceed a configured size limit.
class SizingError : public Error {
 public:
  using Error::Error;
};

/// A name (mode, arm, vertex) is not known to the container it was looked up in.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Operands have incompatible dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Geometric or algebraic degeneracy: zero normal, identical mode pair.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Formula evaluated at a point where it diverges.
class DivergenceError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Malformed or inconsistent user-supplied data.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A layout or option combination the simulator cannot handle.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

}  // namespace ifm
