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

#ifndef WAFERSIM_METRICS_HPP_
#define WAFERSIM_METRICS_HPP_

#include "wafersim/config.hpp"
#include "wafersim/kernel.hpp"

namespace wafersim
{

// Energy and throughput from the run counters. Throws DegenerateError when
// the report covers zero elapsed cycles.
SimReport compute_metrics(SimReport report, const WaferConfig &cfg);

// Closed-form peak: every chiplet retiring sops_per_cycle each cycle.
[[nodiscard]] double peak_throughput_sops(const WaferConfig &cfg) noexcept;

} // namespace wafersim

#endif
