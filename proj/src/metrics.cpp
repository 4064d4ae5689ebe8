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

#include "wafersim/metrics.hpp"

#include "wafersim/error.hpp"

namespace wafersim
{

SimReport compute_metrics(SimReport report, const WaferConfig &cfg)
{
    if (report.elapsed_cycles == 0)
    {
        throw DegenerateError("rates are undefined for a run with zero elapsed cycles");
    }
    EnergyMetrics m;
    const auto sops = static_cast<double>(report.total_sops);
    m.model_time_s = static_cast<double>(report.elapsed_cycles) / cfg.clock_hz;
    m.dynamic_energy_j = sops * cfg.energy_per_sop_pj * 1e-12;
    m.static_energy_j = cfg.static_power_w * m.model_time_s;
    m.total_energy_j = m.dynamic_energy_j + m.static_energy_j;
    m.throughput_sops = sops / m.model_time_s;
    m.average_power_w = m.total_energy_j / m.model_time_s;
    m.efficiency_sops_per_w =
            m.average_power_w != 0.0 ? m.throughput_sops / m.average_power_w : 0.0;
    report.metrics = m;
    return report;
}

double peak_throughput_sops(const WaferConfig &cfg) noexcept
{
    return static_cast<double>(cfg.chiplet_count()) *
            static_cast<double>(cfg.sops_per_cycle_per_chiplet) * cfg.clock_hz;
}

} // namespace wafersim
