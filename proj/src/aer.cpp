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

#include "wafersim/aer.hpp"

#include <cstdio>

#include "wafersim/error.hpp"

namespace wafersim
{

namespace
{

constexpr unsigned neuron_shift = 0;
constexpr unsigned weight_shift = neuron_shift + aer_width::neuron;
constexpr unsigned tag_shift = weight_shift + aer_width::weight;
constexpr unsigned dx_shift = tag_shift + aer_width::step_tag;
constexpr unsigned dy_shift = dx_shift + aer_width::offset;
constexpr unsigned vc_shift = dy_shift + aer_width::offset;
constexpr unsigned relay_shift = vc_shift + 1;
static_assert(aer_width::payload == 68);

constexpr std::uint64_t mask(unsigned width)
{
    return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

void put(AerWord &word, std::uint64_t value, unsigned shift, unsigned width)
{
    value &= mask(width);
    if (shift < 64)
    {
        word.low |= value << shift;
        if (shift + width > 64)
        {
            word.high |= static_cast<std::uint8_t>(value >> (64 - shift));
        }
    }
    else
    {
        word.high |= static_cast<std::uint8_t>(value << (shift - 64));
    }
}

std::uint64_t get(const AerWord &word, unsigned shift, unsigned width)
{
    std::uint64_t value = 0;
    if (shift < 64)
    {
        value = word.low >> shift;
        if (shift + width > 64)
        {
            value |= static_cast<std::uint64_t>(word.high) << (64 - shift);
        }
    }
    else
    {
        value = static_cast<std::uint64_t>(word.high) >> (shift - 64);
    }
    return value & mask(width);
}

std::int64_t sign_extend(std::uint64_t value, unsigned width)
{
    const std::uint64_t sign = std::uint64_t{1} << (width - 1);
    return static_cast<std::int64_t>((value ^ sign) - sign);
}

void check_signed(std::int64_t value, unsigned width, const char *field)
{
    const std::int64_t lo = -(std::int64_t{1} << (width - 1));
    const std::int64_t hi = (std::int64_t{1} << (width - 1)) - 1;
    if (value < lo || value > hi)
    {
        throw EncodingError(std::string("AER field '") + field + "' value " +
                std::to_string(value) + " exceeds " + std::to_string(width) +
                "-bit signed range");
    }
}

} // namespace

std::string AerWord::hex() const
{
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%01x%016llx", static_cast<unsigned>(high),
            static_cast<unsigned long long>(low));
    return buf;
}

AerWord encode_event(const AerEvent &event)
{
    if (event.dst_neuron > mask(aer_width::neuron))
    {
        throw EncodingError("AER field 'dst_neuron' value " +
                std::to_string(event.dst_neuron) + " exceeds 22-bit range");
    }
    check_signed(event.dx, aer_width::offset, "dx");
    check_signed(event.dy, aer_width::offset, "dy");

    AerWord word;
    put(word, event.dst_neuron, neuron_shift, aer_width::neuron);
    put(word, static_cast<std::uint16_t>(event.weight), weight_shift,
            aer_width::weight);
    put(word, event.step_tag, tag_shift, aer_width::step_tag);
    put(word, static_cast<std::uint64_t>(event.dx), dx_shift, aer_width::offset);
    put(word, static_cast<std::uint64_t>(event.dy), dy_shift, aer_width::offset);
    put(word, event.vc == Vc::yx ? 1 : 0, vc_shift, 1);
    put(word, event.relayed ? 1 : 0, relay_shift, 1);
    return word;
}

AerEvent decode_event(const AerWord &word)
{
    AerEvent event;
    event.dst_neuron = static_cast<NeuronIndex>(
            get(word, neuron_shift, aer_width::neuron));
    event.weight = static_cast<Weight>(
            sign_extend(get(word, weight_shift, aer_width::weight), aer_width::weight));
    event.step_tag = static_cast<std::uint16_t>(
            get(word, tag_shift, aer_width::step_tag));
    event.dx = static_cast<std::int32_t>(
            sign_extend(get(word, dx_shift, aer_width::offset), aer_width::offset));
    event.dy = static_cast<std::int32_t>(
            sign_extend(get(word, dy_shift, aer_width::offset), aer_width::offset));
    event.vc = get(word, vc_shift, 1) != 0 ? Vc::yx : Vc::xy;
    event.relayed = get(word, relay_shift, 1) != 0;
    return event;
}

} // namespace wafersim
