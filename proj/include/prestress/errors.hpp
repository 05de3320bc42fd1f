#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace prestress {

/// %.6g formatting for diagnostic messages.
inline std::string format_sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: parameter invariants, malformed configs.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Failure of a numerical procedure on otherwise valid input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularTensor : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonPositiveDeterminant : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonPositiveStretch : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A kinematic map left its admissible region (negative radicand etc.).
class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class QuadratureFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Iterative solver did not meet its tolerance. Carries the last iterate
/// and residual so callers can report them.
class NoConvergence : public NumericalError {
 public:
  NoConvergence(const std::string& what, std::vector<double> last_iterate,
                std::vector<double> residual, int iterations)
      : NumericalError(what),
        last_iterate_(std::move(last_iterate)),
        residual_(std::move(residual)),
        iterations_(iterations) {}
  explicit NoConvergence(const std::string& what) : NumericalError(what) {}

  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
  const std::vector<double>& residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  std::vector<double> last_iterate_;
  std::vector<double> residual_;
  int iterations_ = 0;
};

}  // namespace prestress
