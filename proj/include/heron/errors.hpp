#pragma once

#include <stdexcept>
#include <string>

namespace heron {

/// Base of every error the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates an operation's precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The family parameter k is 0, 2 or -2, where the curve degenerates.
class SingularParameter : public InvalidInput {
 public:
  explicit SingularParameter(const std::string& k)
      : InvalidInput("singular parameter k = " + k) {}
};

/// A cubic model with vanishing discriminant.
class SingularModel : public InvalidInput {
 public:
  SingularModel() : InvalidInput("singular model: discriminant is zero") {}
};

class PointNotOnCurve : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Trial division plus Pollard rho ran out of budget; retry with more.
class FactorizationIncomplete : public Error {
 public:
  explicit FactorizationIncomplete(const std::string& cofactor)
      : Error("factorization incomplete: unsplit composite cofactor " + cofactor) {}
};

class BadReduction : public Error {
 public:
  explicit BadReduction(unsigned long p)
      : Error("bad reduction at p = " + std::to_string(p)), prime(p) {}
  unsigned long prime;
};

class NotASquare : public Error {
 public:
  using Error::Error;
};

/// Two independent computations of the same closed form disagree.
class ClosedFormMismatch : public Error {
 public:
  using Error::Error;
};

class InsufficientGoodPrimes : public Error {
 public:
  using Error::Error;
};

/// A homogeneous-space search found nothing within its height box. This
/// leaves the class undecided; it says nothing about solvability.
class SearchExhausted : public Error {
 public:
  explicit SearchExhausted(unsigned long height)
      : Error("no point found with height <= " + std::to_string(height)), height_bound(height) {}
  unsigned long height_bound;
};

class EmptyInput : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// An internal consistency check failed. Always a bug.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace heron
