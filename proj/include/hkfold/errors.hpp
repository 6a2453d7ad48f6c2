#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace hkfold {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the range an evaluator supports (e.g. Airy beyond |x| = 100).
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Evaluation requested at a point where the requested quantity is undefined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A semiclassical formula was evaluated inside a caustic band.
class CausticError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Square-root prefactor evaluated on (or degenerate at) its branch cut.
class BranchCutError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Quadrature or iteration did not reach its tolerance. Carries the best
/// estimate available when the budget ran out.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, std::complex<double> best_estimate,
                   double error_estimate)
      : Error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

  std::complex<double> best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  std::complex<double> best_estimate_;
  double error_estimate_;
};

/// Newton polishing failed to converge.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// A classical trajectory left the finite-number range.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double escape_time)
      : Error(what), escape_time_(escape_time) {}

  double escape_time() const noexcept { return escape_time_; }

 private:
  double escape_time_;
};

/// Wavefunction amplitude reached the edge of a periodic grid.
class DomainTooSmall : public Error {
 public:
  using Error::Error;
};

}  // namespace hkfold
