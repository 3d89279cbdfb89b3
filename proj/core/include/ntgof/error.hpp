#pragma once

#include <stdexcept>
#include <string>

namespace ntgof {

// Caller violated a documented precondition (bad index, empty sample, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numeric routine could not produce a trustworthy result: singular or
// ill-conditioned matrices, non-finite values, quadrature that did not converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A bound or majorant was queried outside the window where it is defined.
// This is a contract bug in the caller, not a numeric failure.
class WindowError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace ntgof
