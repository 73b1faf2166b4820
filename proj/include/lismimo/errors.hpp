#pragma once

#include <stdexcept>
#include <string>

namespace lismimo {

// Base class for everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user input: malformed scenario, bad argument, violated precondition.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Singular systems, non-finite iterates, failed root brackets.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A computed result broke one of the model's physical invariants
// (passivity, budget satisfaction, energy conservation).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace lismimo
