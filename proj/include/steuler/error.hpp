#pragma once

#include <stdexcept>

namespace steuler {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct ResolutionError : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

/// Raised when a field violates an operation's support precondition.
struct PreconditionError : Error {
  using Error::Error;
};

struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, double residual_)
      : Error(what), residual(residual_) {}
  double residual;
};

}  // namespace steuler
