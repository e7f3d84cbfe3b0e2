// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tailrank Authors

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tailrank {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input. Carries the source name and 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(std::string source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what),
          source_(std::move(source)),
          line_(line) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

/// Well-formed input that violates a cross-record invariant (duplicate ids, bad spans).
class IntegrityError : public Error {
public:
    using Error::Error;
};

/// Caller passed arguments outside an operation's contract.
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace tailrank
