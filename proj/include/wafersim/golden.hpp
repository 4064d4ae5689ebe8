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

// golden.hpp - single-threaded reference simulation.
//
// No mesh, no barrier, no timing: every delivery lands directly in the
// next-step input of its target and neurons update in global id order.
// Because input accumulation is exact integer addition, the spike trace
// must equal the trace of the full kernel.
#ifndef WAFERSIM_GOLDEN_HPP_
#define WAFERSIM_GOLDEN_HPP_

#include "wafersim/kernel.hpp"
#include "wafersim/network.hpp"

namespace wafersim
{

// Uses the network's placement only to label spikes and resolve stimulus.
SpikeTrace golden_run(const Network &network, const Stimulus &stimulus, StepIndex steps);

} // namespace wafersim

#endif
