#pragma once

#include <stdexcept>
#include <string>

namespace rdbp {

// Bad configuration or arguments.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unreadable input or unwritable output.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric failure at run time (singularities, overflow caps, empty conditioning).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rdbp
