#pragma once

#include <stdexcept>
#include <string>

namespace ddml {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched matrix/vector dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument values (bad config, wrong target domain, malformed file).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values where finite ones are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Operation called in the wrong order (e.g. backward without forward).
class StateError : public Error {
 public:
  using Error::Error;
};

}  // namespace ddml
