#pragma once

#include <stdexcept>
#include <string>

namespace mdcf {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the domain of an operation (CLI exit code 2).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A configured work budget would be exceeded (CLI exit code 3).
class BudgetError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Linearly dependent lattice basis.
class RankError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An internal cross-check failed; always a bug, never an input problem.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace mdcf
