#pragma once

#include <stdexcept>
#include <string>

namespace densitylab {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed or unsupported configuration (bad entry id, bad params, bad file).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation not available for the given catalog entry.
class CapabilityError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Trial eigenvalue below the bottom of the model spectrum.
class SpectralFloorError : public DomainError {
public:
    SpectralFloorError(const std::string& what, double floor)
        : DomainError(what), floor_(floor) {}
    [[nodiscard]] double floor() const noexcept { return floor_; }

private:
    double floor_;
};

/// Level integral requested too close to a critical value of r.
class CriticalLevelError : public DomainError {
public:
    CriticalLevelError(const std::string& what, double level)
        : DomainError(what), level_(level) {}
    [[nodiscard]] double level() const noexcept { return level_; }

private:
    double level_;
};

/// The pole lies on the submanifold and Δr has no finite value there.
class PoleSingularityError : public DomainError {
public:
    using DomainError::DomainError;
};

/// ODE stepper gave up; last_s is the last abscissa reached with a valid state.
class IntegrationFailure : public std::runtime_error {
public:
    IntegrationFailure(const std::string& what, double last_s)
        : std::runtime_error(what), last_s_(last_s) {}
    [[nodiscard]] double last_s() const noexcept { return last_s_; }

private:
    double last_s_;
};

} // namespace densitylab
