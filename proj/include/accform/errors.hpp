#pragma once

#include <stdexcept>
#include <string>

namespace accform {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad input: unparsable files, invalid parameters, shapes that do not fit.
struct InputError : Error {
    using Error::Error;
};

struct DimensionError : InputError {
    using InputError::InputError;
};

// The operation was asked about a system that does not meet its hypotheses.
struct PreconditionError : Error {
    using Error::Error;
};

// Two independent computations of the same object disagree beyond tolerance.
struct NumericalDegeneracyError : Error {
    using Error::Error;
};

}  // namespace accform
