#pragma once

#include <stdexcept>
#include <string>

namespace cloak {

// Base for every failure raised by the library. Callers that only need to
// report the problem can catch this; the subclasses let callers branch.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an input value was violated (bad epsilon, p < 1, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

// det(Dpsi, Dtheta) <= 0: the pair does not describe an orientation
// preserving map.
class OrientationError : public Error {
 public:
  using Error::Error;
};

class DegenerateAngleError : public Error {
 public:
  using Error::Error;
};

class NonPositiveSlopeError : public Error {
 public:
  using Error::Error;
};

// Requested value lies outside the range of a non-surjective function.
class RangeError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class InadmissibleProfileError : public Error {
 public:
  using Error::Error;
};

// Du.V <= 0 somewhere on the grid.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

class OutOfAnnulusError : public Error {
 public:
  using Error::Error;
};

// Evaluation would cross a branch cut of a multivalued inverse.
class BranchError : public Error {
 public:
  using Error::Error;
};

class RetryBudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace cloak
