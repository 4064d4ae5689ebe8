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

#include "wafersim/error.hpp"

namespace wafersim
{

std::string_view category_name(ErrorCategory category) noexcept
{
    switch (category)
    {
    case ErrorCategory::parse:
        return "parse";
    case ErrorCategory::validation:
        return "validation";
    case ErrorCategory::infeasible:
        return "infeasible";
    case ErrorCategory::protocol:
        return "protocol";
    case ErrorCategory::encoding:
        return "encoding";
    case ErrorCategory::degenerate:
        return "degenerate";
    }
    return "unknown";
}

namespace
{
std::string parse_message(
        const std::string &source, std::size_t line, const std::string &detail)
{
    std::string msg = source;
    if (line > 0)
    {
        msg += ":" + std::to_string(line);
    }
    return msg + ": " + detail;
}
} // namespace

ParseError::ParseError(
        const std::string &source, std::size_t line, const std::string &detail)
        : Error(ErrorCategory::parse, parse_message(source, line, detail))
        , line_(line)
{
}

} // namespace wafersim
