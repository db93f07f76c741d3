#pragma once

#include <stdexcept>
#include <string>

namespace qcorr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidPartition : public Error {
 public:
  using Error::Error;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// 0^0 or a negative base inside a power expression.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Raised when qLarge < qSmall is passed to a weighted pair bound.
class OrderingError : public Error {
 public:
  using Error::Error;
};

// Raised in exact-preferred mode when only the optimizer could answer.
class EstimateRequired : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, double at)
      : Error(what), exponent_(at) {}
  double exponent() const noexcept { return exponent_; }

 private:
  double exponent_;
};

}  // namespace qcorr
