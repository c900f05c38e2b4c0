#pragma once

#include <stdexcept>
#include <string>

namespace cqw {

// Base of every error raised by the library. `kind()` is the short tag used
// in the CLI's machine-readable error report.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "domain"; }
};

// Quadrature, normalization or conditioning failure.
class NumericError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "numeric"; }
};

// Bad grid, mismatched arrays, or other caller-side setup problem.
class ConfigError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "config"; }
};

class ValidationError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "validation"; }
};

class InfeasibleDesign : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "infeasible-design"; }
};

// Operation invoked at the wrong point of the cascade.
class SequencingError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "sequencing"; }
};

// Problem too large for an exhaustive method.
class SizeError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "size"; }
};

}  // namespace cqw
