#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace smartbeta {

/// Root of every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    /// Short machine-readable tag, e.g. "parse_error".
    virtual const char* kind() const noexcept { return "error"; }
};

/// Bad or inconsistent run configuration. Maps to CLI exit status 2.
class ConfigError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "config_error"; }
};

/// Precondition on a function argument violated by the caller.
class InvalidArgument : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "invalid_argument"; }
};

/// Malformed input row. Carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }
    const char* kind() const noexcept override { return "parse_error"; }

private:
    std::size_t line_;
};

/// Input data that parses but violates a domain invariant (e.g. low > high).
class ValidationError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "validation_error"; }
};

/// Arithmetic outside the domain of a formula (division by a zero price, ...).
class DomainError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "domain_error"; }
};

/// Highest equals lowest over a stochastic window.
class DegenerateRangeError : public DomainError {
public:
    using DomainError::DomainError;
    const char* kind() const noexcept override { return "degenerate_range"; }
};

/// Not enough observations for the requested lookback.
class InsufficientHistoryError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "insufficient_history"; }
};

class EmptyTrainingSetError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "empty_training_set"; }
};

/// Training data or model that cannot produce a meaningful classifier.
class DegenerateModelError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "degenerate_model"; }
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "singular_matrix"; }
};

/// Data does not cover the warm-up needed before the first rebalance.
class WarmupError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "warmup_error"; }
};

}  // namespace smartbeta
