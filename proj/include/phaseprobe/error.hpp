#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phaseprobe {

// Base of every error raised by the library. The CLI maps ParameterError to a
// usage failure and everything else to a numerical failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

// Raised when a quantity is undefined at the requested point (w = w*, a
// direction at the projection center, a semidefinite 2x2 form, ...).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Non-finite values or divergence inside an iterative method.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::size_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace phaseprobe
