#pragma once

#include <stdexcept>
#include <string>

namespace cointopo {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input text (CSV cell that fails to parse, bad row shape).
struct ParseError : Error {
    using Error::Error;
};

// Header/label problems: missing expected label, duplicate labels.
struct SchemaError : Error {
    using Error::Error;
};

// Data that is structurally valid but unusable: empty after filtering,
// too short for the requested operation, zero variance.
struct DataError : Error {
    using Error::Error;
};

// Dimension mismatches between containers.
struct ShapeError : Error {
    using Error::Error;
};

// Out-of-range or inconsistent parameters.
struct ParamError : Error {
    using Error::Error;
};

// Numerical failure: rank-deficient design, collinear channels,
// optimizer unable to find a finite objective.
struct NumericalError : Error {
    using Error::Error;
};

// A configurable size guard was exceeded (simplex cap, oracle cap).
struct SizeLimitError : Error {
    using Error::Error;
};

}  // namespace cointopo
