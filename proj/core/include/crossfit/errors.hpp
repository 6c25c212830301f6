#pragma once

#include <stdexcept>
#include <string>

namespace crossfit {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed caller input: dimension mismatches, bad options, out-of-range arguments.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Document violates the body/config schema. The message carries the field path.
class ParseError : public InputError {
 public:
  explicit ParseError(const std::string& path, const std::string& what)
      : InputError(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// A stated precondition does not hold (non-interior origin, irregular frame, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Chord-form operations require a convex body.
class UnsupportedFormError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Ray never left the body within the bracket cap (unbounded zero set).
class NoIntersectionError : public Error {
 public:
  using Error::Error;
};

/// A blended body lost its interior point.
class DegenerateFamilyError : public Error {
 public:
  using Error::Error;
};

/// Brute-force search is restricted to dimension 3.
class UnsupportedDimensionError : public InputError {
 public:
  using InputError::InputError;
};

/// Grid search would exceed the evaluation budget.
class BudgetError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace crossfit
