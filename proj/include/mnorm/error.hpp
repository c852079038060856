// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mnorm {

/// Base of every error raised by the library. The exit_code() is what the
/// command-line front end returns when the error escapes a subcommand.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual int exit_code() const noexcept = 0;
};

// ---- configuration / usage errors (exit 1) --------------------------------

class ConfigError : public Error {
public:
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 1; }
};

/// Incompatible shapes for a kernel; the message names both shapes.
class DimensionError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// A norm kind applied to the wrong arity (vector norm on a matrix, etc).
class TypeError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// No input-independent projection constant exists for the norm.
class AssumptionViolatedError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class RangeError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Run records that cannot be compared (different problems or lengths).
class ComparisonError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class ParseError : public ConfigError {
public:
    ParseError(const std::string& what, int line)
        : ConfigError(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

// ---- numeric errors (exit 2) ----------------------------------------------

class NumericError : public Error {
public:
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 2; }
};

class SingularInputError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Zero row/column/vector where a strict normalization needs a nonzero one.
class DegenerateInputError : public NumericError {
public:
    using NumericError::NumericError;
};

class DomainError : public NumericError {
public:
    using NumericError::NumericError;
};

// ---- divergence (exit 3) --------------------------------------------------

class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, long step) : Error(what), step_(step) {}
    [[nodiscard]] int exit_code() const noexcept override { return 3; }
    [[nodiscard]] long step() const noexcept { return step_; }

private:
    long step_;
};

}  // namespace mnorm
