#pragma once

#include <stdexcept>
#include <string>

namespace povmc {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input object violates a type invariant (Hermiticity, positivity,
/// normalization, nonsignalling, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Operand dimensions do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input outside the mathematical domain of an operation, e.g. a
/// rank-deficient state where a faithful one is required.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An operation declined to run, e.g. a strategy count above the cap.
class RefusalError : public Error {
 public:
  using Error::Error;
};

}  // namespace povmc
