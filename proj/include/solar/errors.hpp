#pragma once

#include <stdexcept>
#include <string>

namespace solar {

// Thrown for inputs outside an operation's domain (negative capacity,
// probability outside [0, 1], non-finite values, bad period index).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A bracketed search ran out of iterations or could not bracket a root.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The contract-based market has no clearing price for the offered capacity.
class NoEquilibrium : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The first-order expansion needs a non-zero derivative of the truncated
// mean at the zero-premium capacity.
class SingularDerivative : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed data or configuration files. Carries the offending line when the
// problem is local to one row.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what, long line = -1)
      : std::runtime_error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}

  long line() const noexcept { return line_; }

 private:
  long line_;
};

}  // namespace solar
