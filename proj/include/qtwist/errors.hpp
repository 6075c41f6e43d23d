#pragma once

#include <stdexcept>
#include <string>

namespace qtwist {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A table, cache or factorisation bound is too small for the request.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Exact integer arithmetic would overflow the fixed-width representation.
class OverflowError : public Error {
 public:
  using Error::Error;
};

class PoleError : public Error {
 public:
  using Error::Error;
};

/// Numerical integration failed its own accuracy checks.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// A local factor that must be inverted is (numerically) zero.
class SingularFactorError : public Error {
 public:
  using Error::Error;
};

/// The twist index violates the non-vanishing condition on 1 + lambda(p) + 1/p.
class ConditionError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

/// Configuration or command-line problem (maps to exit code 2).
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace qtwist
