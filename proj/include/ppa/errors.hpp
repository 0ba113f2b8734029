#pragma once

#include <stdexcept>
#include <string>

namespace ppa {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point does not belong to the space (or to the domain) it was used with.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An argument is outside its admissible range (t outside [0,1], empty tail, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A space/objective/experiment specification is malformed.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A step size violates the admissibility bound lambda < 1/(2*alpha).
class StepSizeError : public Error {
 public:
  using Error::Error;
};

/// The requested operation is not supported for these inputs
/// (oracle in high dimension, monitor without a known minimizer, ...).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace ppa
