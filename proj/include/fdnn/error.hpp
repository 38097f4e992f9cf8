// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The fdnn Authors

#pragma once

#include <stdexcept>
#include <string>

namespace fdnn {

/// Bad input: malformed records, inconsistent configuration, arity mismatch.
/// The CLI maps this to exit status 1.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A record that failed to parse, carrying where it came from.
class ParseError : public ValidationError {
public:
  ParseError(const std::string &source, std::size_t line, const std::string &what)
      : ValidationError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Failure during computation (non-finite loss, degenerate kernel, ...).
/// The CLI maps this to exit status 2.
class RuntimeFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace fdnn
