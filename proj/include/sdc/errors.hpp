#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdc {

/// Operand dimensions do not fit the operation (non-square, non-conformable, ...).
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative kernel did not converge or a post-condition could not be met in floating point.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, double smallest_singular_value)
      : std::runtime_error(what), smallest_singular_value_(smallest_singular_value) {}

  double smallest_singular_value() const noexcept { return smallest_singular_value_; }

 private:
  double smallest_singular_value_;
};

/// Random instance generation exhausted its rejection budget.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A certificate refers to matrices or stages that do not exist in the collection.
class MalformedCertificate : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace sdc
