#pragma once

#include <stdexcept>
#include <string>

namespace ktb {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand sizes do not agree (vector length vs operator dimension, shapes).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or otherwise out-of-contract input values.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// A linear system or log-determinant hit a zero or negative eigenvalue.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// The reduced-precision path produced a value outside the half range.
class PrecisionOverflowError : public Error {
 public:
  using Error::Error;
};

/// Every restart of a hyperparameter fit failed.
class FitError : public Error {
 public:
  using Error::Error;
};

/// Invalid benchmark or optimizer configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ktb
