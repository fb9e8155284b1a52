#pragma once

#include <stdexcept>
#include <string>

namespace sparsematch {

// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad problem dimensions, unusable flags, eta >= 1/6, etc.
struct config_error : error {
    using error::error;
};

// Parameter planning failed (e.g. no co-prime factorization within budget).
struct planning_error : config_error {
    using config_error::config_error;
};

// Malformed or inconsistent inputs to an operation.
struct invalid_input : error {
    using error::error;
};

// Corrupt or unreadable persisted data (bad magic, checksum mismatch).
struct data_error : error {
    using error::error;
};

} // namespace sparsematch
