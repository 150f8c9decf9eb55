#pragma once

#include <stdexcept>
#include <string>

namespace cryptosplit {

/// Bad arguments or configuration (CLI exit code 1).
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file or corrupt persisted state.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A check rejected its input (CLI exit code 2).
struct VerificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Memory or time limits (CLI exit code 3).
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace cryptosplit
