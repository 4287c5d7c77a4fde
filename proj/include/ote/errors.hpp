#pragma once

#include <stdexcept>
#include <string>

namespace ote {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Query outside the tabulated support of a material.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Malformed input files (tables, configs).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a physical or geometric constraint.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Linear-algebra breakdown: singular interface systems, ill-conditioned modes.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// (1 - R R') singular: lossless closed cavity at this mode.
class ResonanceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// API misuse, e.g. reading transmission blocks of a half-space.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double partial_value, double partial_error)
      : Error(what), partial_value_(partial_value), partial_error_(partial_error) {}
  double partial_value() const { return partial_value_; }
  double partial_error() const { return partial_error_; }

 private:
  double partial_value_;
  double partial_error_;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace ote
