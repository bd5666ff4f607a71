#pragma once

#include <stdexcept>
#include <string>

namespace vistra {

// Invalid caller input (bad sizes, out-of-range parameters) is reported with
// std::invalid_argument. The two types below cover the remaining failure
// classes the CLI maps onto distinct exit codes.

/// Malformed input data: unparsable files, schema violations.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite values produced during a numeric computation.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vistra
