#pragma once

#include <stdexcept>
#include <string>

namespace specbound {

/// Raised when a value lies outside the domain an operation is defined on
/// (invalid geometry, u beyond the tube, non-positive eigenvalue inputs, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure cannot produce a trustworthy answer
/// (integrator instability, count mismatch, truncation certificate failure).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Lattice truncation could not be certified for the requested window.
class TruncationError : public NumericalError {
public:
    explicit TruncationError(const std::string& what)
        : NumericalError(what + " (increase M_max)") {}
};

}  // namespace specbound
