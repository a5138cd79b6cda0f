#pragma once

#include <stdexcept>
#include <string>

namespace orbitshape {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions do not match (point vs. transform, image vs. transform).
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Two images differ in point count or ambient dimension.
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

/// Linear part of an affine element is numerically singular.
class SingularLinearPart : public Error {
 public:
  using Error::Error;
};

/// All points coincide, so no scale can be extracted.
class DegenerateImage : public Error {
 public:
  using Error::Error;
};

/// An iterative kernel exceeded its sweep budget.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

/// A value violates an operation's documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

/// Malformed input. Carries the 1-based line and field when known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t field = 0)
      : Error(format(what, line, field)), reason_(what), line_(line), field_(field) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t field() const noexcept { return field_; }
  /// The message without the location prefix.
  const std::string& reason() const noexcept { return reason_; }

  /// Same error with `source` (usually a file path) in front of the location.
  ParseError located_in(const std::string& source) const {
    ParseError out(*this);
    static_cast<Error&>(out) = Error(source + ": " + what());
    return out;
  }

 private:
  static std::string format(const std::string& what, std::size_t line, std::size_t field) {
    if (line == 0) return what;
    std::string out = "line " + std::to_string(line);
    if (field != 0) out += ", field " + std::to_string(field);
    return out + ": " + what;
  }

  std::string reason_;
  std::size_t line_;
  std::size_t field_;
};

}  // namespace orbitshape
