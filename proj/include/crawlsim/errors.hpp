#pragma once

#include <stdexcept>
#include <string>

namespace crawlsim {

/// Raised for invalid parameters, gaits, grids or configuration values.
/// The message names the offending field.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a solver cannot complete (step underflow, non-finite state,
/// Zeno accumulation). `time()` is the simulation time of failure.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace crawlsim
