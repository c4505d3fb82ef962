#pragma once

#include <stdexcept>

namespace backoff {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of the operation.
struct DomainError : Error {
    using Error::Error;
};

/// (N, B) falls in the gap band where the concentration results do not apply.
struct RegimeError : Error {
    using Error::Error;
};

/// A stated precondition of the experiment is not met.
struct PreconditionError : Error {
    using Error::Error;
};

/// Exhaustive enumeration would exceed the configured placement cap.
struct CapExceededError : Error {
    using Error::Error;
};

/// Requested computation exceeds the configured memory budget.
struct ResourceError : Error {
    using Error::Error;
};

/// Ratio denominator is exactly zero; the ratio is undefined.
struct DegenerateRatioError : Error {
    using Error::Error;
};

}  // namespace backoff
