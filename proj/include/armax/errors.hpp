#pragma once

#include <stdexcept>
#include <string>

namespace armax {

/// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Invalid or inconsistent process / run configuration.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An estimator has nothing to work with (no exceedances, empty conditioning set, ...).
struct UndefinedResult : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A numeric limit or series failed to converge.
struct NumericLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace armax
