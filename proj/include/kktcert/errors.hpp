#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kktcert {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input errors: malformed text, wrong shapes, points outside the problem domain.
class InputError : public Error {
 public:
  using Error::Error;
};

// Numerical failures: the input was well formed but the computation could not
// deliver the requested object.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Expression syntax error. `offset()` is the byte offset into the parsed text.
class ParseError : public InputError {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : InputError(message + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Problem-file error; `line()` is 1-based (0 when the error is not tied to a line).
class ProblemFormatError : public InputError {
 public:
  ProblemFormatError(const std::string& message, std::size_t line)
      : InputError(line == 0 ? message : "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DimensionMismatch : public InputError {
 public:
  using InputError::InputError;
};

/// The point is not strictly inside the open domain box.
class OutsideDomain : public InputError {
 public:
  using InputError::InputError;
};

/// An operation was called on a state it explicitly refuses (e.g. a sign
/// witness requested for a nonnegative multiplier).
class PreconditionFailed : public InputError {
 public:
  using InputError::InputError;
};

/// log of a non-positive value, sqrt of a negative value, division by zero, ...
class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RankDeficient : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class LicqFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The objective gradient lies in the span of the active constraint gradients,
/// so no descent witness can be built from the extended family.
class DependentFamily : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class JacobianSingular : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The assembled chart Jacobian at the origin is not the identity.
class BasisCheckFailed : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoDescentFound : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace kktcert
