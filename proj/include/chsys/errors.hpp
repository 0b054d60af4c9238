#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace chsys {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arrays of mismatched length, grids that differ, malformed files.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Input outside the domain of an operation (non-monotone map, atoms where none are allowed, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A state violates one of its algebraic constraints beyond tolerance.
class ConstraintViolation : public Error {
 public:
  using Error::Error;
};

/// Time integration failed (NaN, drift budget exceeded, unresolved wave breaking).
class IntegrationError : public Error {
 public:
  explicit IntegrationError(const std::string& what, double time = 0.0)
      : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Invalid scenario or study configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Compact form of a number for error messages.
inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace chsys
