#pragma once

#include <stdexcept>
#include <string>

namespace cqed {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fock truncation too small for the requested coherent amplitude.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Physical parameters outside the domain of a closed-form expression.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operand dimensions do not match the Hilbert space they claim to live in.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A matrix failed the density-matrix checks (hermiticity, trace, positivity).
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

/// Integration step left the trace-preserving regime (step too large).
class StabilityError : public Error {
 public:
  StabilityError(const std::string& what, long step = -1)
      : Error(step >= 0 ? what + " (step " + std::to_string(step) + ")" : what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

/// Null-space / steady-state extraction failed.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Gaussian posterior update left the Gaussian family (non-positive variance).
class InvalidUpdate : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration could not be parsed or validated.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cqed
