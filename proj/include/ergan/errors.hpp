#pragma once

#include <stdexcept>
#include <string>

namespace ergan {

// Bad or inconsistent input data (CSV parse failures, shape mismatches,
// degenerate clusterings, corrupt checkpoints). CLI exit code 2.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (non-finite loss or parameters). CLI exit code 3.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ergan
