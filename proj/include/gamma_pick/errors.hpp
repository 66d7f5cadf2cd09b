#pragma once

#include <stdexcept>
#include <string>

namespace gamma_pick {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain where a formula is defined
/// (a point outside G, |alpha| > 1, a vanishing denominator).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be positive semidefinite is not, beyond tolerance.
class NotPsdError : public Error {
 public:
  NotPsdError(const std::string& what, double eigenvalue)
      : Error(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

/// An iterative routine hit its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Inputs that must describe the same node set (or the same problem) do not.
class MismatchError : public Error {
 public:
  using Error::Error;
};

/// Neither a primal nor a dual certificate could be produced.
class UndecidedError : public Error {
 public:
  UndecidedError(const std::string& what, double primal_gap, double dual_violation)
      : Error(what), primal_gap_(primal_gap), dual_violation_(dual_violation) {}
  /// t^2 - tau* on the final alpha support (negative: primal infeasible there).
  double primal_gap() const noexcept { return primal_gap_; }
  /// Best verified dual violation reached (below the dual tolerance).
  double dual_violation() const noexcept { return dual_violation_; }

 private:
  double primal_gap_;
  double dual_violation_;
};

}  // namespace gamma_pick
