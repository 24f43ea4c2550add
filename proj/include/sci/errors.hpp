#pragma once

#include <stdexcept>
#include <string>

namespace sci {

// Bad user input: dimensions, parameter ranges, unknown ids.
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Enumeration / allocation guards tripped.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed file contents.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure: singular operator, non-PD covariance.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sci
