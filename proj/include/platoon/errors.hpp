#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace platoon {

// Shape mismatch between matrices or vectors.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Argument outside the domain an operation is defined on.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Iterative numerics that failed to converge or saw non-finite data.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A bound was evaluated with a non-positive contraction margin.
class CertificateError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Simulation state left the finite / bounded region.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t vehicle, double time, const std::string& what)
        : std::runtime_error(what), vehicle_(vehicle), time_(time) {}

    // 1-based index of the first offending vehicle.
    [[nodiscard]] std::size_t vehicle() const noexcept { return vehicle_; }
    [[nodiscard]] double time() const noexcept { return time_; }

private:
    std::size_t vehicle_;
    double time_;
};

// Malformed or out-of-range configuration input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace platoon
