#pragma once

#include <stdexcept>
#include <string>

namespace ntqs {

/// Base for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input file could not be parsed.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A value violates a documented invariant. `field()` names the offender.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Configurations of different kind or dimension were combined.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A caller-supplied argument breaks a precondition (e.g. a start inside an obstacle).
class InputError : public Error {
public:
    using Error::Error;
};

/// A bounded search ran out of budget (sampling attempts, expert retries).
class BudgetExhausted : public Error {
public:
    using Error::Error;
};

/// Training diverged or could not start.
class TrainingError : public Error {
public:
    using Error::Error;
};

} // namespace ntqs
