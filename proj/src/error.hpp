#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nhqm {

/// Bad input: violated precondition, malformed config, out-of-range argument.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical contract could not be met (non-convergence, underflow,
/// completeness violation, self-orthogonal vector).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// QR iteration failed to deflate the eigenvalue at `index`.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(std::size_t index, const std::string& what)
      : NumericalError(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// c-norm of a vector vanished: the vector sits at (or next to) a branch
/// point where two eigenvectors coalesce.
class SelfOrthogonalError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nhqm
