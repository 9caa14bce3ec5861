#pragma once

#include <stdexcept>

namespace lowrank {

// Failure taxonomy. The CLI maps these onto its exit codes: parameter_error
// and its refinements exit 2, io_error exits 3, numerical_error exits 1.

struct parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Shapes of two arguments do not conform.
struct dimension_error : parameter_error {
    using parameter_error::parameter_error;
};

// A structural precondition on the values was violated: orthonormality,
// subspace containment, tangent-space membership, or certificate support.
struct structural_error : parameter_error {
    using parameter_error::parameter_error;
};

struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace lowrank
