#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gridgrow {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke a precondition (repeated values, bad shapes, missing tables).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Malformed text input. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(format(what, line, column)), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, std::size_t line, std::size_t column) {
        if (line == 0) return what;
        return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
    }

    std::size_t line_;
    std::size_t column_;
};

/// Rows of a grid document with differing token counts.
class DimensionError : public ParseError {
public:
    using ParseError::ParseError;
};

/// A value lies outside the mathematical domain of the operation
/// (growth rate below 1, inadmissible weight, finite or unknown cell class).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A derivative was requested where it does not exist (zero entry, step leaving (0,1)).
class BoundaryError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A brute-force cap or memory budget would be exceeded.
class ResourceError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_residual)
        : Error(what + " (last residual " + std::to_string(last_residual) + ")"),
          last_residual_(last_residual) {}

    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

}  // namespace gridgrow
