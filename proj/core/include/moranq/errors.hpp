#pragma once

#include <stdexcept>
#include <string>

namespace moranq {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A word uses a symbol outside the alphabet of its level.
class InvalidWordError : public Error {
 public:
  using Error::Error;
};

// An index or length argument is outside its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

// A Moran system or measure description violates a structural invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// No suffix within the search depth yields a strictly interior sub-cell.
class NoWitnessError : public Error {
 public:
  using Error::Error;
};

// A computation would exceed a configured size budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// A numerical routine was called outside its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace moranq
