#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace micromorph {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rank, slot, or entry-count mismatch.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Point or integration geometry outside the declared field domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Constitutive data inconsistent with the stress symmetries.
class ConstitutiveError : public Error {
 public:
  using Error::Error;
};

/// Numerical precondition failed (non-orthogonal rotation, FD step underflow, ...).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed expression or scenario text. `position()` is a zero-based
/// character offset into the offending input.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " (at position " + std::to_string(position) + ")"), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace micromorph
