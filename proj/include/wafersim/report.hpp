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

// report.hpp - on-disk forms of simulation results.
//
// Spike trace (text):
//
//   # step x y neuron
//   <step> <x> <y> <neuron>        sorted, one spike per line
//   end <record_count>
//
// The end record guards against truncation. A zero-byte file reads as an
// empty trace. The report is JSON.
#ifndef WAFERSIM_REPORT_HPP_
#define WAFERSIM_REPORT_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "wafersim/config.hpp"
#include "wafersim/kernel.hpp"

namespace wafersim
{

std::string format_trace(const SpikeTrace &trace);
SpikeTrace parse_trace(const std::string &text, const std::string &source_name = "<trace>");
SpikeTrace load_trace(const std::filesystem::path &path);

std::string format_report(const SimReport &report);
SimReport parse_report(const std::string &text, const std::string &source_name = "<report>");
SimReport load_report(const std::filesystem::path &path);

// "step budget actual drain" per line.
std::string format_step_log(const std::vector<StepRecord> &records);
std::string format_packet_trace(const std::vector<PacketRecord> &packets);

// Human-readable summary: totals, energy, per-chiplet utilization of the
// occupied chiplets and the step-budget history.
std::string render_summary(const SpikeTrace &trace, const SimReport &report,
        const WaferConfig &cfg);

} // namespace wafersim

#endif
