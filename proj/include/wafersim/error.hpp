// Copyright 2026 The wafersim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// error.hpp - exception hierarchy shared by every module.
//
// Each class maps onto one CLI exit code (see cli.hpp), so callers only
// need to catch Error and ask for its category.
#ifndef WAFERSIM_ERROR_HPP_
#define WAFERSIM_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace wafersim
{

enum class ErrorCategory
{
    parse,
    validation,
    infeasible,
    protocol,
    encoding,
    degenerate,
};

std::string_view category_name(ErrorCategory category) noexcept;

class Error : public std::runtime_error
{
public:
    Error(ErrorCategory category, const std::string &what)
            : std::runtime_error(what)
            , category_(category)
    {
    }
    [[nodiscard]] ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

// Malformed input text; line is 1-based, 0 when not applicable.
class ParseError : public Error
{
public:
    ParseError(const std::string &source, std::size_t line,
            const std::string &detail);
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error
{
public:
    explicit ValidationError(const std::string &what)
            : Error(ErrorCategory::validation, what)
    {
    }
};

class InfeasibleError : public Error
{
public:
    explicit InfeasibleError(const std::string &what)
            : Error(ErrorCategory::infeasible, what)
    {
    }
};

// Raised when an internal protocol contract breaks (barrier misuse,
// misrouted packet, counter underflow). These indicate simulator bugs.
class ProtocolError : public Error
{
public:
    explicit ProtocolError(const std::string &what)
            : Error(ErrorCategory::protocol, what)
    {
    }
};

class EncodingError : public Error
{
public:
    explicit EncodingError(const std::string &what)
            : Error(ErrorCategory::encoding, what)
    {
    }
};

// A quantity is mathematically undefined for the given input
// (zero-variance ranks, zero elapsed time, empty normalisation).
class DegenerateError : public Error
{
public:
    explicit DegenerateError(const std::string &what)
            : Error(ErrorCategory::degenerate, what)
    {
    }
};

} // namespace wafersim

#endif
