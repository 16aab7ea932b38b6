#pragma once

#include <stdexcept>
#include <string>

namespace lct {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input too small or geometrically impossible (patch smaller than a cell,
// target larger than the frame, ...).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Shapes of two operands do not agree.
class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

// A file exists but its content does not follow the expected layout.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A required resource (table file, image, directory) is missing or unreadable.
class ResourceError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Scoring or proposing with an SVM that has never been trained.
class NoModelError : public Error {
 public:
  using Error::Error;
};

// State extraction from an empty Gaussian mixture.
class NoEstimateError : public Error {
 public:
  using Error::Error;
};

// Every scale level was skipped.
class NoScaleError : public Error {
 public:
  using Error::Error;
};

// Caller-supplied data violates a precondition (frame size change, bad box).
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace lct
