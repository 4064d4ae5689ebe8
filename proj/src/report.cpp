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

#include "wafersim/report.hpp"

#include <charconv>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "wafersim/error.hpp"

namespace wafersim
{

using nlohmann::json;

std::string format_trace(const SpikeTrace &trace)
{
    std::ostringstream out;
    out << "# step x y neuron\n";
    for (const SpikeRecord &s : trace)
    {
        out << s.step << ' ' << s.chiplet.x << ' ' << s.chiplet.y << ' ' << s.neuron << '\n';
    }
    out << "end " << trace.size() << '\n';
    return out.str();
}

namespace
{

template <typename T>
bool read_number(const std::string &token, T &value)
{
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    return ec == std::errc() && ptr == token.data() + token.size();
}

} // namespace

SpikeTrace parse_trace(const std::string &text, const std::string &source_name)
{
    SpikeTrace trace;
    if (text.empty())
    {
        return trace;
    }
    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    bool ended = false;
    while (std::getline(in, raw))
    {
        ++line;
        if (raw.empty() || raw[0] == '#')
        {
            continue;
        }
        if (ended)
        {
            throw ParseError(source_name, line, "malformed trace: data after end record");
        }
        std::istringstream words(raw);
        std::vector<std::string> t;
        std::string token;
        while (words >> token)
        {
            t.push_back(token);
        }
        if (t.empty())
        {
            continue;
        }
        if (t[0] == "end")
        {
            std::size_t count = 0;
            if (t.size() != 2 || !read_number(t[1], count))
            {
                throw ParseError(source_name, line, "malformed trace: bad end record");
            }
            if (count != trace.size())
            {
                throw ParseError(source_name, line,
                        "malformed trace: end record announces " + std::to_string(count) +
                                " spikes, file holds " + std::to_string(trace.size()));
            }
            ended = true;
            continue;
        }
        SpikeRecord r;
        if (t.size() != 4 || !read_number(t[0], r.step) || !read_number(t[1], r.chiplet.x) ||
                !read_number(t[2], r.chiplet.y) || !read_number(t[3], r.neuron))
        {
            throw ParseError(source_name, line,
                    "malformed trace: expected 'step x y neuron', got '" + raw + "'");
        }
        if (!trace.empty() && !(trace.back() < r))
        {
            throw ParseError(source_name, line, "malformed trace: records out of order");
        }
        trace.push_back(r);
    }
    if (!ended)
    {
        throw ParseError(source_name, line, "malformed trace: truncated (missing end record)");
    }
    return trace;
}

SpikeTrace load_trace(const std::filesystem::path &path)
{
    return parse_trace(read_text_file(path, "trace"), path.string());
}

std::string format_report(const SimReport &report)
{
    json j;
    j["steps"] = report.steps;
    j["total_sops"] = report.total_sops;
    j["total_spikes"] = report.total_spikes;
    j["events_injected"] = report.events_injected;
    j["events_delivered"] = report.events_delivered;
    j["events_relayed"] = report.events_relayed;
    j["elapsed_cycles"] = report.elapsed_cycles;
    j["saturation_count"] = report.saturation_count;
    j["barrier_violations"] = report.barrier_violations;
    j["quiescence_violations"] = report.quiescence_violations;
    json chiplets = json::array();
    for (const ChipletStats &c : report.chiplets)
    {
        chiplets.push_back({{"x", c.coord.x}, {"y", c.coord.y}, {"neurons", c.neurons},
                {"synapses", c.synapses}, {"sops", c.sops}, {"spikes", c.spikes}});
    }
    j["chiplets"] = chiplets;
    json steps = json::array();
    for (const StepRecord &s : report.step_records)
    {
        steps.push_back({{"step", s.step}, {"budget", s.budget}, {"actual", s.actual},
                {"drain", s.drain}, {"domain_completion", s.domain_completion}});
    }
    j["step_records"] = steps;
    if (report.metrics)
    {
        const EnergyMetrics &m = *report.metrics;
        j["metrics"] = {{"dynamic_energy_j", m.dynamic_energy_j},
                {"static_energy_j", m.static_energy_j}, {"total_energy_j", m.total_energy_j},
                {"model_time_s", m.model_time_s}, {"throughput_sops", m.throughput_sops},
                {"average_power_w", m.average_power_w},
                {"efficiency_sops_per_w", m.efficiency_sops_per_w}};
    }
    return j.dump(2) + "\n";
}

SimReport parse_report(const std::string &text, const std::string &source_name)
{
    json j;
    try
    {
        j = json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        throw ParseError(source_name, 0, std::string("malformed report: ") + e.what());
    }
    try
    {
        SimReport r;
        r.steps = j.at("steps").get<StepIndex>();
        r.total_sops = j.at("total_sops").get<std::uint64_t>();
        r.total_spikes = j.at("total_spikes").get<std::uint64_t>();
        r.events_injected = j.at("events_injected").get<std::uint64_t>();
        r.events_delivered = j.at("events_delivered").get<std::uint64_t>();
        r.events_relayed = j.at("events_relayed").get<std::uint64_t>();
        r.elapsed_cycles = j.at("elapsed_cycles").get<Cycle>();
        r.saturation_count = j.at("saturation_count").get<std::uint64_t>();
        r.barrier_violations = j.value("barrier_violations", std::uint64_t{0});
        r.quiescence_violations = j.value("quiescence_violations", std::uint64_t{0});
        for (const json &c : j.at("chiplets"))
        {
            r.chiplets.push_back({{c.at("x").get<std::uint32_t>(), c.at("y").get<std::uint32_t>()},
                    c.at("neurons").get<std::uint64_t>(), c.at("synapses").get<std::uint64_t>(),
                    c.at("sops").get<std::uint64_t>(), c.at("spikes").get<std::uint64_t>()});
        }
        for (const json &s : j.at("step_records"))
        {
            r.step_records.push_back({s.at("step").get<StepIndex>(),
                    s.at("budget").get<std::uint64_t>(), s.at("actual").get<std::uint64_t>(),
                    s.at("drain").get<std::uint64_t>(),
                    s.at("domain_completion").get<std::vector<std::uint64_t>>()});
        }
        if (j.contains("metrics"))
        {
            const json &m = j.at("metrics");
            r.metrics = EnergyMetrics{m.at("dynamic_energy_j").get<double>(),
                    m.at("static_energy_j").get<double>(), m.at("total_energy_j").get<double>(),
                    m.at("model_time_s").get<double>(), m.at("throughput_sops").get<double>(),
                    m.at("average_power_w").get<double>(),
                    m.at("efficiency_sops_per_w").get<double>()};
        }
        return r;
    }
    catch (const json::exception &e)
    {
        throw ParseError(source_name, 0, std::string("malformed report: ") + e.what());
    }
}

SimReport load_report(const std::filesystem::path &path)
{
    return parse_report(read_text_file(path, "report"), path.string());
}

std::string format_step_log(const std::vector<StepRecord> &records)
{
    std::ostringstream out;
    out << "# step budget actual drain\n";
    for (const StepRecord &s : records)
    {
        out << s.step << ' ' << s.budget << ' ' << s.actual << ' ' << s.drain << '\n';
    }
    return out.str();
}

std::string format_packet_trace(const std::vector<PacketRecord> &packets)
{
    std::ostringstream out;
    out << "# step_tag src_x src_y dst_x dst_y hops cycles relayed\n";
    for (const PacketRecord &p : packets)
    {
        out << p.step_tag << ' ' << p.source.x << ' ' << p.source.y << ' ' << p.destination.x
            << ' ' << p.destination.y << ' ' << p.hops << ' ' << p.cycles_in_flight << ' '
            << (p.relayed ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string render_summary(const SpikeTrace &trace, const SimReport &report,
        const WaferConfig &cfg)
{
    std::ostringstream out;
    out << "steps            " << report.steps << '\n'
        << "sops             " << report.total_sops << '\n'
        << "spikes           " << trace.size() << '\n'
        << "events           " << report.events_injected << " injected, "
        << report.events_delivered << " delivered, " << report.events_relayed << " relayed\n"
        << "elapsed cycles   " << report.elapsed_cycles << '\n';
    const EnergyMetrics m = report.metrics.value_or(EnergyMetrics{});
    out << std::setprecision(6);
    out << "dynamic energy   " << m.dynamic_energy_j << " J\n"
        << "static energy    " << m.static_energy_j << " J\n"
        << "total energy     " << m.total_energy_j << " J\n"
        << "model time       " << m.model_time_s << " s\n"
        << "throughput       " << m.throughput_sops << " SOP/s\n"
        << "efficiency       " << m.efficiency_sops_per_w << " SOP/s/W\n";

    std::size_t occupied = 0;
    for (const ChipletStats &c : report.chiplets)
    {
        occupied += c.neurons > 0 ? 1 : 0;
    }
    out << "\noccupied chiplets " << occupied << '\n';
    out << "   x   y    neurons   neuron%     synapses  synapse%         sops     spikes\n";
    out << std::fixed;
    for (const ChipletStats &c : report.chiplets)
    {
        if (c.neurons == 0)
        {
            continue;
        }
        const double nu = 100.0 * static_cast<double>(c.neurons) /
                static_cast<double>(cfg.neuron_capacity_per_chiplet);
        const double su = 100.0 * static_cast<double>(c.synapses) /
                static_cast<double>(cfg.synapse_capacity_per_chiplet);
        out << std::setw(4) << c.coord.x << std::setw(4) << c.coord.y << std::setw(11)
            << c.neurons << std::setw(10) << std::setprecision(3) << nu << std::setw(13)
            << c.synapses << std::setw(10) << su << std::setw(13) << c.sops << std::setw(11)
            << c.spikes << '\n';
    }
    out << "\nstep budget history\n";
    out << "    step     budget     actual\n";
    for (const StepRecord &s : report.step_records)
    {
        out << std::setw(8) << s.step << std::setw(11) << s.budget << std::setw(11) << s.actual
            << '\n';
    }
    return out.str();
}

} // namespace wafersim
