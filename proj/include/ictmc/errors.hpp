#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ictmc {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed argument: wrong length, non-finite value, bad time ordering.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Two operands live on different state spaces.
class SpaceMismatch : public Error {
public:
    SpaceMismatch() : Error("state space mismatch") {}
    using Error::Error;
};

/// One violated constraint found while validating a matrix or a rate-set bound.
struct Violation {
    std::string rule;               // e.g. "R1", "R2", "T1", "T2", "bounds"
    std::size_t row = 0;
    std::optional<std::size_t> col; // empty for row-level rules
    double residual = 0.0;

    std::string describe() const;
};

/// Result of a validation pass. Empty means every constraint held.
struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    std::string describe() const;
};

class ValidationError : public Error {
public:
    explicit ValidationError(ValidationReport report, std::string context = {});
    const ValidationReport& report() const { return report_; }
    /// Which object failed, e.g. "rate_set.matrices[1]"; may be empty.
    const std::string& context() const { return context_; }

private:
    ValidationReport report_;
    std::string context_;
};

/// The step count needed for the requested accuracy exceeds the configured cap.
class StepBudgetExceeded : public Error {
public:
    StepBudgetExceeded(double required, std::uint64_t cap);
    double required() const { return required_; }
    std::uint64_t cap() const { return cap_; }

private:
    double required_;
    std::uint64_t cap_;
};

/// An Euler factor (I + ΔQ̲) was requested with Δ·‖Q̲‖ > 1.
class StepSizeError : public Error {
public:
    using Error::Error;
};

} // namespace ictmc
