#pragma once

#include <stdexcept>
#include <string>

namespace mirl {

/// Bad environment / experiment configuration (grid too small, unknown profile, ...).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A caller broke an operation's precondition (e.g. an illegal action was stepped).
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

/// Vectors that must be aligned (feature catalogs, policy supports) are not.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Input data failed validation (inconsistent trajectory, corrupted file line, ...).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mirl

namespace mirl {

/// A file declares a schema version this build does not understand.
struct SchemaVersionError : ValidationError {
    using ValidationError::ValidationError;
};

}  // namespace mirl
