#pragma once

#include <stdexcept>
#include <string>

namespace wmr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (quantile level, rho < 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed measure input: non-positive weights, mass not summing to one, empty support.
class MeasureError : public Error {
 public:
  using Error::Error;
};

/// A convex-order precondition does not hold.
class OrderError : public Error {
 public:
  using Error::Error;
};

/// Generic precondition failure (mean mismatch, inadmissible candidate, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

/// Numerical solver failed to converge; carries the last KKT residual.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Couplings whose marginals do not match the stated measures.
class CouplingError : public Error {
 public:
  using Error::Error;
};

class CompositionError : public Error {
 public:
  using Error::Error;
};

/// A martingale coupling entry moves mass across irreducible components.
class StructureError : public Error {
 public:
  using Error::Error;
};

/// Internal post-condition verification failed; indicates a bug or severe round-off.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Growth condition on the cost does not hold for the requested ladder.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// I/O or parse failure (CLI exit code 2).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace wmr
