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

// aer.hpp - address-event packets and their fixed-width wire encoding.
//
// Wire layout (LSB first, 68 payload bits):
//   [ 0,22)  destination neuron
//   [22,38)  weight, two's complement
//   [38,54)  time-step tag (wraps modulo 2^16)
//   [54,60)  dx, two's complement
//   [60,66)  dy, two's complement
//   [66]     virtual channel (0 = XY, 1 = YX)
//   [67]     relayed flag
// The hop counter is router sideband state and is not part of the payload.
#ifndef WAFERSIM_AER_HPP_
#define WAFERSIM_AER_HPP_

#include <cstdint>
#include <string>

#include "wafersim/types.hpp"

namespace wafersim
{

enum class Vc : std::uint8_t
{
    xy = 0,
    yx = 1,
};

namespace aer_width
{
constexpr unsigned neuron = 22;
constexpr unsigned weight = 16;
constexpr unsigned step_tag = 16;
constexpr unsigned offset = 6;
constexpr unsigned flags = 2;
constexpr unsigned payload = neuron + weight + step_tag + 2 * offset + flags;
} // namespace aer_width

struct AerEvent
{
    std::int32_t dx{0};
    std::int32_t dy{0};
    NeuronIndex dst_neuron{0};
    Weight weight{0};
    std::uint16_t step_tag{0};
    Vc vc{Vc::xy};
    // Set once the one-shot XY->YX relay switch has fired.
    bool relayed{false};
    std::uint32_t hop_count{0};

    bool operator==(const AerEvent &) const = default;
};

[[nodiscard]] constexpr std::uint16_t step_tag_of(StepIndex step) noexcept
{
    return static_cast<std::uint16_t>(step & 0xFFFFu);
}

// 68 significant bits: 64 in low, 4 in high.
struct AerWord
{
    std::uint64_t low{0};
    std::uint8_t high{0};

    bool operator==(const AerWord &) const = default;
    [[nodiscard]] bool is_zero() const noexcept { return low == 0 && high == 0; }
    [[nodiscard]] std::string hex() const;
};

// Throws EncodingError naming the first field that does not fit.
AerWord encode_event(const AerEvent &event);
// hop_count of the result is always 0.
AerEvent decode_event(const AerWord &word);

} // namespace wafersim

#endif
