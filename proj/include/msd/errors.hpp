#pragma once

#include <stdexcept>
#include <string>

namespace msd {

/// Base class for all library errors.
struct MsdError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input file (edge list, snapshot, config).
struct ParseError : MsdError {
    using MsdError::MsdError;
};

/// Every edge ended up in the noise bucket; callers may retry with a
/// smaller min_cluster_size.
struct AllNoiseError : MsdError {
    using MsdError::MsdError;
};

/// An iterative solver ran out of its iteration budget.
struct ConvergenceError : MsdError {
    using MsdError::MsdError;
};

} // namespace msd
