#pragma once

#include <stdexcept>
#include <string>

namespace g2fit {

// Invalid argument values: negative rates, NaN inputs, empty grids.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Flat parameter vector does not match the model's parameter layout.
struct LayoutError : ValidationError {
    using ValidationError::ValidationError;
};

// Side-pulse truncation window does not cover the requested delay grid.
struct TruncationError : ValidationError {
    using ValidationError::ValidationError;
};

// Malformed input file; message carries the offending row/field.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Inconsistent objective or fit configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Line-search bracket does not enclose a minimum.
struct BracketingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// NRMSE normalization undefined (constant reference curve).
struct NormalizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace g2fit
