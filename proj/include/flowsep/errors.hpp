#pragma once

#include <stdexcept>
#include <string>

namespace flowsep {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input, bad configuration, violated precondition. CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Mismatched lengths or sizes.
class DimensionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// A value outside its admissible range.
class RangeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Requested model order exceeds what the data supports.
class OrderError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Numerical breakdown: singular matrices, poles, divergence. CLI exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class UnexcitedFrequencyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PoleEvaluationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotAnIntegratorError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Exit code contract of the command line tool.
int exit_code_for(const std::exception& e) noexcept;

}  // namespace flowsep
