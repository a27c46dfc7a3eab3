// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinchsim Authors
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pinch {

//! A precondition on an input value was violated.
class InvalidArgument : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

//! A computation produced a degenerate result (e.g. zero radiated power).
class NumericalError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Malformed text input; carries the 1-based line that failed.
class ParseError : public std::runtime_error
{
  public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

//! A file could not be read or written (or an overwrite was refused).
class IoError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool cond, const std::string& msg)
{
    if (!cond)
        throw InvalidArgument(msg);
}
} // namespace detail

} // namespace pinch
