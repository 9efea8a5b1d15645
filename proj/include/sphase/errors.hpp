#pragma once

#include <stdexcept>
#include <string>

namespace sphase {

// Every failure the library reports derives from Error and carries the
// process exit status the CLI maps it to.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept = 0;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

// Parameters valid in principle but outside the regimes this library solves
// (m > 2 with d != 2, m = 2 routed to the wrong solver, ...).
class RegimeError : public DomainError {
public:
  using DomainError::DomainError;
};

// The requested equilibrium family has no member at this interaction strength.
class NoSolutionError : public DomainError {
public:
  using DomainError::DomainError;
};

class NumericalError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

// Quadrature or special-function evaluation could not reach its accuracy contract.
class AccuracyError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class DivergentIntegralError : public DomainError {
public:
  using DomainError::DomainError;
};

// Two independent routes to the same quantity disagree.
class ConsistencyError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

} // namespace sphase
