// errors.hpp: exception types shared by every quapi module

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace quapi {

/// Base of all library errors. `exit_code()` is what the CLI returns when the
/// error escapes a command.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 1; }
};

/// Invalid argument outside of any configuration file (e.g. non-finite ω).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A violated invariant of a validated type. `field()` names what failed.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error("validation error [" + field + "]: " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }
    int exit_code() const noexcept override { return 2; }

private:
    std::string field_;
};

/// Malformed configuration input, with a location hint.
class ConfigError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

/// Requested working set does not fit the memory budget or could not be allocated.
class CapacityError : public Error {
public:
    CapacityError(std::uint64_t required_bytes, const std::string& what)
        : Error(what), required_bytes_(required_bytes) {}
    std::uint64_t required_bytes() const noexcept { return required_bytes_; }
    int exit_code() const noexcept override { return 3; }

private:
    std::uint64_t required_bytes_;
};

/// Adaptive quadrature failed to reach the requested tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(double error_estimate, const std::string& what)
        : Error(what), error_estimate_(error_estimate) {}
    double error_estimate() const noexcept { return error_estimate_; }
    int exit_code() const noexcept override { return 4; }

private:
    double error_estimate_;
};

/// Brute-force path sum refused because the path count exceeds its guard.
class SizeError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 5; }
};

}  // namespace quapi
