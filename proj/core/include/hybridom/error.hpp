#pragma once

#include <stdexcept>
#include <string>

namespace hybridom {

// Invalid inputs: parameters, grids, parameter files. Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Solver or integrator failure. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The drift matrix has an eigenvalue with non-negative real part, so no
// stationary state exists.
class UnstableSystemError : public NumericalError {
 public:
  UnstableSystemError(const std::string& what, double max_real_eig)
      : NumericalError(what), max_real_eig_(max_real_eig) {}

  double max_real_eig() const noexcept { return max_real_eig_; }

 private:
  double max_real_eig_;
};

}  // namespace hybridom
