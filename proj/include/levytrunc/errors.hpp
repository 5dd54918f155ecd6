#pragma once

#include <stdexcept>
#include <string>

namespace levytrunc {

// Invalid user input: bad parameters, violated preconditions, malformed config.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input data that cannot be used (CSV parse failures, irregular timestamps).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical or internal-consistency failure.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InfiniteMassError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, double achieved_error)
        : NumericalError(what + " (achieved error estimate " + std::to_string(achieved_error) + ")"),
          achieved_error_(achieved_error) {}

    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

class EnvelopeViolation : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace levytrunc
