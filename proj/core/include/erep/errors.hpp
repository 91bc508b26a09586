#pragma once

#include <stdexcept>

namespace erep {

// Error taxonomy. The CLI maps these onto process exit codes:
// ConfigError -> 2, DataError -> 3, SolverError -> 4.

// Bad parameters, malformed config, missing referenced files.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Violations found in market data or numeric invariants derived from it
// (nonpositive prices, parse failures, broken portfolio constraints).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Optimization kernel failed to produce a certified feasible result.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace erep
