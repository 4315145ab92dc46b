#pragma once

#include <stdexcept>
#include <string>

namespace vhsim {

/// Malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model assumption (A1..A12) fails on the discrete data. The message
/// starts with the assumption label, e.g. "A6: m must be >= m_* > 0".
class AssumptionViolation : public ConfigError {
public:
    AssumptionViolation(std::string label, const std::string& what)
        : ConfigError(label + ": " + what), label_(std::move(label)) {}

    [[nodiscard]] const std::string& label() const noexcept { return label_; }

private:
    std::string label_;
};

/// Time step outside the explicit stability region, or non-finite values.
class StabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A runtime invariant check failed under the abort policy (CLI exit code 3).
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem failure (CLI exit code 4).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vhsim
