// errors.hpp -- exception hierarchy shared by all bfsurf components.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bfsurf {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two fields with different GridSpecs were combined.
struct GridMismatchError : Error {
    using Error::Error;
};

/// A value left its admissible set (rho outside (0,1), invalid norm order, ...).
struct DomainError : Error {
    using Error::Error;
};

/// A mean-zero precondition was violated (discrete H^-1 machinery).
struct NonzeroMeanError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

/// Base for nonlinear-solver failures; carries the iterate history so a
/// failed step can be examined postmortem.
struct SolverError : Error {
    SolverError(const std::string& msg, std::vector<double> residuals,
                std::vector<double> dampings)
        : Error(msg), residual_history(std::move(residuals)),
          damping_history(std::move(dampings)) {}
    std::vector<double> residual_history;
    std::vector<double> damping_history;
};

/// Newton failed to reach the residual tolerance within the iteration budget.
struct NewtonDivergenceError : SolverError {
    using SolverError::SolverError;
};

/// Line-search damping fell below the configured minimum without a merit decrease.
struct StepDampedError : SolverError {
    using SolverError::SolverError;
};

/// A guaranteed discrete property (energy decay, mass conservation, positivity)
/// failed on an accepted step. Indicates a bug or a broken run; never ignored.
struct InvariantViolationError : Error {
    using Error::Error;
};

} // namespace bfsurf
