#pragma once

#include <stdexcept>
#include <string>

namespace clines {

/// A parameter or input violates a documented invariant (exit code 3 in the CLI).
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A (p,q,D) triple that does not map back into the gamete simplex.
class InfeasibleState : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical procedure failed (divergence, escape, non-convergence).
/// `diagnostic` carries a small JSON document describing the failing state.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, std::string diagnostic = "{}")
        : std::runtime_error(what), diagnostic_(std::move(diagnostic)) {}

    const std::string& diagnostic() const noexcept { return diagnostic_; }

private:
    std::string diagnostic_;
};

/// A simulated field left its admissible range (exit code 3 in the CLI).
class InvariantViolation : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

}  // namespace clines
