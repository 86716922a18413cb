#pragma once

#include <stdexcept>
#include <string>

namespace netcov {

// Exit-code mapping used by the CLI: config 2, data 3, numerical 4.

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dimension mismatch between inputs (a DataError subclass).
struct ShapeError : DataError {
    using DataError::DataError;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace netcov
