#pragma once

#include <stdexcept>
#include <string>

namespace bugsum {

// Malformed or inconsistent input data (bad JSON, schema mismatch, missing
// fields, out-of-range ids).  CLI maps this to exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure (non-finite features, divergence, singular systems).
// CLI maps this to exit code 3.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad invocation detected below the argument parser (conflicting options,
// missing model for a supervised method).  CLI maps this to exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace bugsum
