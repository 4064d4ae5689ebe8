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

#ifndef WAFERSIM_TYPES_HPP_
#define WAFERSIM_TYPES_HPP_

#include <compare>
#include <cstdint>
#include <ostream>

namespace wafersim
{

using Cycle = std::uint64_t;
using StepIndex = std::uint64_t;
using NeuronIndex = std::uint32_t;
using Weight = std::int16_t;
using Potential = std::int32_t;

struct ChipletCoord
{
    std::uint32_t x{0};
    std::uint32_t y{0};

    auto operator<=>(const ChipletCoord &) const = default;
};

inline std::ostream &operator<<(std::ostream &out, const ChipletCoord &c)
{
    return out << '(' << c.x << ',' << c.y << ')';
}

// Row-major chiplet numbering used for every per-chiplet array.
[[nodiscard]] constexpr std::size_t chiplet_index(
        const ChipletCoord &c, std::uint32_t grid_width) noexcept
{
    return static_cast<std::size_t>(c.y) * grid_width + c.x;
}

[[nodiscard]] constexpr ChipletCoord chiplet_at(
        std::size_t index, std::uint32_t grid_width) noexcept
{
    return {static_cast<std::uint32_t>(index % grid_width),
            static_cast<std::uint32_t>(index / grid_width)};
}

} // namespace wafersim

#endif
