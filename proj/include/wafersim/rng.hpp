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

// rng.hpp - seeded, platform-independent random draws.
//
// std::mt19937_64's output sequence is fixed by the standard but the
// std::*_distribution adaptors are not, so bounded draws are done here.
#ifndef WAFERSIM_RNG_HPP_
#define WAFERSIM_RNG_HPP_

#include <cstdint>
#include <random>

namespace wafersim
{

class Rng
{
public:
    explicit Rng(std::uint64_t seed)
            : engine_(seed)
    {
    }

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, bound); bound > 0. Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t bound)
    {
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
        std::uint64_t x = engine_();
        while (x >= limit)
        {
            x = engine_();
        }
        return x % bound;
    }

    // Uniform in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi)
    {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    // Uniform in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

} // namespace wafersim

#endif
