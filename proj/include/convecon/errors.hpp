#pragma once

#include <stdexcept>
#include <string>

namespace convecon {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input violates a parameter, strategy or file invariant.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A closed-form optimum has a non-positive denominator (no interior solution).
class NoInteriorOptimum : public Error {
 public:
  using Error::Error;
};

/// Fixed-point iteration hit its iteration limit.
class Diverged : public Error {
 public:
  Diverged(const std::string& what, int iterations)
      : Error(what), iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

/// The grid incumbent sits on an outer grid boundary after refinement.
class Unbounded : public Error {
 public:
  using Error::Error;
};

/// No integer point in the searched neighbourhood reaches the gain target.
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// Too few distinct design points to identify the regression coefficients.
class InsufficientDesign : public Error {
 public:
  using Error::Error;
};

}  // namespace convecon
