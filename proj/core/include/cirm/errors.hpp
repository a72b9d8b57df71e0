#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cirm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is 1-based, 0 when not line-specific.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Curve queried outside its knot range.
class ExtrapolationError : public Error {
 public:
  using Error::Error;
};

/// Parameters outside the domain where a formula is real-valued.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A closed-form expression hit a zero or negative denominator.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Gram-Charlier expansion undefined (non-positive variance or price).
/// Calibration treats this as a soft failure.
class ExpansionError : public Error {
 public:
  using Error::Error;
};

}  // namespace cirm
