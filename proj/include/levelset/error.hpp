#pragma once

#include <stdexcept>
#include <string>

namespace levelset {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments: dimension mismatch, out-of-range index, malformed parameters.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// An elementary function was evaluated outside its domain (log of a non-positive value, ...).
class DomainError : public Error {
 public:
  DomainError(const std::string& function, const std::string& detail)
      : Error(function + ": " + detail), function_(function) {}
  const std::string& function() const noexcept { return function_; }

 private:
  std::string function_;
};

/// |grad psi| fell below the configured floor; level-set geometry is undefined there.
class CriticalPoint : public Error {
 public:
  using Error::Error;
};

/// A point lies in (or too close to) the singular set of a catalog field.
class ExclusionViolation : public Error {
 public:
  using Error::Error;
};

/// Implicit root solve failed: no sign change, or dg/dt vanishes at the root.
class RootError : public Error {
 public:
  using Error::Error;
};

}  // namespace levelset
