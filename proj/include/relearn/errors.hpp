#pragma once

#include <stdexcept>
#include <string>

namespace relearn {

/// Base of every domain error raised by the library. The CLI maps these to
/// exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (dimension mismatch, bad text, empty sample).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A configured size cap was exceeded; the message names the bound.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Construction parameters outside their valid region.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The LP solver broke down numerically or hit its iteration limit.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// A learner's linear program has no feasible point (e.g. W too small).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace relearn
