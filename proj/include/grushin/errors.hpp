#pragma once

#include <stdexcept>

namespace grushin {

/// Base class for numerical failures raised by the toolkit.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Evaluation was requested outside a domain of validity: too close to the
/// singular line, across a branch cut, or violating a stated precondition.
struct DomainError : Error {
    using Error::Error;
};

/// An iteration diverged, blew up, or exceeded its budget.
struct DivergenceError : Error {
    using Error::Error;
};

/// Deliberate refusal: the requested computation would exceed a hard work
/// bound (e.g. covering grids with more than 1e8 centers).
struct RefusalError : Error {
    using Error::Error;
};

} // namespace grushin
