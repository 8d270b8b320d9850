#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace twistlab {

// Root of every failure raised by the library. The CLI maps ConfigError and
// SchemaError to exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class ComputationError : public Error {
 public:
  using Error::Error;
};

// Newton/gradient minimization exhausted its budget.
class NonConvergence : public ComputationError {
 public:
  NonConvergence(const std::string& what, std::vector<double> best_thetas, double residual)
      : ComputationError(what), best_thetas_(std::move(best_thetas)), residual_(residual) {}

  const std::vector<double>& best_thetas() const noexcept { return best_thetas_; }
  double residual() const noexcept { return residual_; }

 private:
  std::vector<double> best_thetas_;
  double residual_;
};

// A pair of orbit points whose cyclic order is not preserved by the map.
class OrderingViolation : public ComputationError {
 public:
  OrderingViolation(const std::string& what, int i, int j)
      : ComputationError(what), i_(i), j_(j) {}
  int first() const noexcept { return i_; }
  int second() const noexcept { return j_; }

 private:
  int i_;
  int j_;
};

// The pushed-forward vertical became vertical again: the base point is not in
// the Green set.
class TransversalityFailure : public ComputationError {
 public:
  TransversalityFailure(const std::string& what, int n) : ComputationError(what), n_(n) {}
  int step() const noexcept { return n_; }

 private:
  int n_;
};

class GreenSetViolation : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

// Not enough cloud points near a base point to estimate a cone.
class SparseCloud : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

}  // namespace twistlab
