#pragma once

#include <stdexcept>
#include <string>

namespace bifsim {

/// Invalid user-supplied configuration (grid, bandwidth, trial count, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A path does not cover the interval an operation needs.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Operation requires a Brownian driver with known variance.
class UnsupportedPathError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parameters fall outside the regime in which a formula holds.
class SemanticsError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Quadrature or integration failed to reach the requested accuracy.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A simulation ran to its horizon without the expected event.
/// `partial` carries the value accumulated so far.
class HorizonExceeded : public std::runtime_error {
public:
    HorizonExceeded(const std::string& what, double partial)
        : std::runtime_error(what), partial_(partial) {}
    double partial() const noexcept { return partial_; }

private:
    double partial_;
};

} // namespace bifsim
