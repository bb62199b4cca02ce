#pragma once

#include <stdexcept>
#include <string>

namespace levisqueeze {

// Bad input: malformed configuration, violated precondition, inconsistent
// dimensions. The CLI maps these to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The numerics could not deliver a trustworthy answer. Exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoSteadyStateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace levisqueeze
