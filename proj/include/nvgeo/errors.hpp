#pragma once

#include <stdexcept>
#include <string>

namespace nvgeo {

// Base class for every error raised by the library; the CLI maps subclasses
// onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or malformed configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Numerical failure, e.g. a curve that does not decay enough to be fitted
// (CLI exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class InsufficientDecay : public NumericalError {
 public:
  InsufficientDecay() : NumericalError("insufficient decay") {}
};

}  // namespace nvgeo
