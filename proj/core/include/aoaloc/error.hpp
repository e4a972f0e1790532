#pragma once

#include <stdexcept>
#include <string>

namespace aoaloc {

/// Precondition violated by a caller-supplied value.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input carried no usable energy (e.g. an all-zero channel).
class NoSignalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An estimator could not produce a meaningful answer from its input.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bearing geometry admits no unique position (parallel or too few lines).
class UnlocalizableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aoaloc
