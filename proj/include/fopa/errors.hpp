#pragma once

#include <stdexcept>
#include <string>

namespace fopa {

// Bad argument or precondition violation.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Base for failures of the numerics themselves (as opposed to bad input).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A spectrum or kernel does not fit on the grid it was placed on.
class GridCoverageError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// A truncated series has not converged at the requested order.
class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// The AC response ratio has no unique optimum (no signal-idler correlation).
class UndefinedOptimum : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace fopa
