#pragma once

#include <stdexcept>
#include <string>

namespace portopt {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation
/// (divergent mgf, log of a nonpositive number, etc.).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Iterative method failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Matrix not invertible within the conditioning threshold.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// Matrix failed the positive (semi)definiteness check.
class NotPositiveDefiniteError : public Error {
 public:
  using Error::Error;
};

/// Constraint set has no feasible point.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Symmetry reduction requested but the inputs do not respect the
/// block symmetry.
class SymmetryViolationError : public Error {
 public:
  using Error::Error;
};

/// Malformed or out-of-schema input document.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Not enough rows to compute a statistic.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace portopt
