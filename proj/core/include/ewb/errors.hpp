#pragma once

#include <stdexcept>
#include <string>

namespace ewb {

/// A point or parameter lies outside the domain of the requested operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A point was passed to an operation of a space of a different kind.
struct SpaceMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// The geodesic between the given endpoints is not unique (antipodal pair).
struct NonUniqueGeodesicError : DomainError {
  using DomainError::DomainError;
};

/// All weights vanish; the normalized measure does not exist.
struct DegenerateMeasureError : DomainError {
  using DomainError::DomainError;
};

/// A loss returned NaN; the message names the offending atom.
struct LossEvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An iterative solver failed and the caller asked for hard errors.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A configuration file failed to parse or validate.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ewb
