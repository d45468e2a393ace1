#pragma once

#include <stdexcept>
#include <string>

namespace hdrvqa {

/// Bad input data: malformed files, mismatched headers, impossible requests.
struct DataError : std::runtime_error {
    explicit DataError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Numeric failure: non-convergence, degenerate systems.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace hdrvqa
