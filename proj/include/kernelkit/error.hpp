#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kernelkit {

// Numerical failures. The CLI maps these to exit status 1.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a kernel Gram matrix cannot be factorized after jitter escalation.
class ConditioningError : public NumericalError {
 public:
  ConditioningError(std::size_t node_count, double min_separation);

  std::size_t node_count() const { return node_count_; }
  double min_separation() const { return min_separation_; }

 private:
  std::size_t node_count_;
  double min_separation_;
};

// Linear solver failure in the finite-element module.
class SolverError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace kernelkit
