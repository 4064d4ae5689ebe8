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

#include "wafersim/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "wafersim/error.hpp"

namespace wafersim
{

std::vector<SyncDomain> default_sync_domains(
        std::uint32_t grid_width, std::uint32_t grid_height)
{
    const std::uint32_t split_x = (grid_width + 1) / 2;
    const std::uint32_t split_y = (grid_height + 1) / 2;
    const std::uint32_t x_ranges[2][2] = {{0, split_x}, {split_x, grid_width}};
    const std::uint32_t y_ranges[2][2] = {{0, split_y}, {split_y, grid_height}};

    std::vector<SyncDomain> domains;
    for (const auto &yr : y_ranges)
    {
        for (const auto &xr : x_ranges)
        {
            SyncDomain domain;
            domain.id = static_cast<std::uint32_t>(domains.size());
            for (std::uint32_t y = yr[0]; y < yr[1]; ++y)
            {
                for (std::uint32_t x = xr[0]; x < xr[1]; ++x)
                {
                    domain.members.push_back({x, y});
                }
            }
            if (!domain.members.empty())
            {
                domains.push_back(std::move(domain));
            }
        }
    }
    if (!domains.empty())
    {
        domains.front().global_master = true;
    }
    return domains;
}

WaferConfig default_config()
{
    WaferConfig cfg;
    cfg.sync_domains = default_sync_domains(cfg.grid_width, cfg.grid_height);
    return cfg;
}

std::vector<std::string> validate_config(const WaferConfig &cfg)
{
    std::vector<std::string> violations;
    auto fail = [&violations](const std::string &field, const std::string &rule) {
        violations.push_back(field + ": " + rule);
    };

    if (cfg.grid_width == 0 || cfg.grid_height == 0)
    {
        fail("grid", "width x height must be >= 1");
    }
    // Relative offsets travel in 6-bit signed fields.
    if (cfg.grid_width > 32 || cfg.grid_height > 32)
    {
        fail("grid", "width and height must be <= 32 (6-bit hop offsets)");
    }
    if (cfg.neuron_capacity_per_chiplet == 0)
    {
        fail("chiplet.neuron_capacity", "must be > 0");
    }
    if (cfg.neuron_capacity_per_chiplet > (std::uint64_t{1} << 22))
    {
        fail("chiplet.neuron_capacity", "must be <= 2^22 (22-bit neuron field)");
    }
    if (cfg.synapse_capacity_per_chiplet == 0)
    {
        fail("chiplet.synapse_capacity", "must be > 0");
    }
    if (!(cfg.clock_hz > 0.0) || !std::isfinite(cfg.clock_hz))
    {
        fail("clock_hz", "must be > 0");
    }
    if (cfg.sops_per_cycle_per_chiplet == 0)
    {
        fail("chiplet.sops_per_cycle", "must be > 0");
    }
    if (cfg.parallelism == 0)
    {
        fail("chiplet.parallelism", "must be > 0");
    }
    if (cfg.link_phase_cycles == 0)
    {
        fail("link.phase_cycles", "must be > 0");
    }
    if (cfg.link_fifo_depth == 0)
    {
        fail("link.fifo_depth", "must be > 0");
    }
    if (!(cfg.energy_per_sop_pj >= 0.0) || !std::isfinite(cfg.energy_per_sop_pj))
    {
        fail("energy.energy_per_sop_pj", "must be finite and >= 0");
    }
    if (!std::isfinite(cfg.static_power_w))
    {
        fail("energy.static_power_w", "must be finite");
    }

    const StepPolicy &policy = cfg.step_policy;
    if (policy.initial_budget == 0 || policy.min_budget == 0 ||
            policy.max_budget == 0)
    {
        fail("step_policy", "budgets must be > 0");
    }
    if (!(policy.smoothing >= 0.0 && policy.smoothing <= 1.0))
    {
        fail("step_policy.smoothing", "must lie in [0, 1]");
    }
    if (!(policy.min_budget <= policy.initial_budget &&
                policy.initial_budget <= policy.max_budget))
    {
        fail("step_policy", "requires min <= initial <= max");
    }

    std::set<std::uint32_t> ids;
    std::map<ChipletCoord, std::uint32_t> owner;
    std::size_t masters = 0;
    bool overlap = false;
    for (const SyncDomain &domain : cfg.sync_domains)
    {
        if (!ids.insert(domain.id).second)
        {
            fail("sync_domains", "duplicate domain id " + std::to_string(domain.id));
        }
        if (domain.global_master)
        {
            ++masters;
        }
        for (const ChipletCoord &c : domain.members)
        {
            if (!cfg.contains(c))
            {
                std::ostringstream msg;
                msg << "domain " << domain.id << " member " << c
                    << " lies outside the " << cfg.grid_width << "x"
                    << cfg.grid_height << " grid";
                fail("sync_domains", msg.str());
                continue;
            }
            if (!owner.emplace(c, domain.id).second)
            {
                overlap = true;
            }
        }
    }
    if (overlap)
    {
        fail("sync_domains", "domains overlap");
    }
    if (cfg.grid_width > 0 && cfg.grid_height > 0 && cfg.grid_width <= 32 &&
            cfg.grid_height <= 32)
    {
        std::size_t missing = 0;
        for (std::uint32_t y = 0; y < cfg.grid_height; ++y)
        {
            for (std::uint32_t x = 0; x < cfg.grid_width; ++x)
            {
                missing += owner.count({x, y}) == 0 ? 1 : 0;
            }
        }
        if (missing > 0)
        {
            fail("sync_domains",
                    std::to_string(missing) +
                            " chiplet(s) not covered by any domain");
        }
    }
    if (masters != 1)
    {
        fail("sync_domains",
                "exactly one domain must be global_master (found " +
                        std::to_string(masters) + ")");
    }
    return violations;
}

namespace
{

class Reader
{
public:
    explicit Reader(std::string source)
            : source_(std::move(source))
    {
    }

    [[noreturn]] void error(const YAML::Node &node, const std::string &detail) const
    {
        const auto mark = node.Mark();
        const std::size_t line = mark.is_null() ? 0 : mark.line + 1;
        throw ParseError(source_, line, detail);
    }

    void expect_map(const YAML::Node &node, const std::string &field,
            const std::set<std::string> &allowed) const
    {
        if (!node.IsMap())
        {
            error(node, "field '" + field + "' must be a mapping");
        }
        for (const auto &kv : node)
        {
            const auto key = kv.first.as<std::string>();
            if (allowed.count(key) == 0)
            {
                error(kv.first, "unknown field '" + (field.empty() ? key : field + "." + key) + "'");
            }
        }
    }

    template <typename T>
    void read(const YAML::Node &parent, const char *key, const std::string &field,
            T &out) const
    {
        const YAML::Node node = parent[key];
        if (!node)
        {
            return;
        }
        if (!node.IsScalar())
        {
            error(node, "field '" + field + "' must be a scalar");
        }
        if constexpr (std::is_unsigned_v<T>)
        {
            const auto text = node.Scalar();
            if (!text.empty() && text[0] == '-')
            {
                error(node, "field '" + field + "' must be non-negative");
            }
        }
        try
        {
            out = node.as<T>();
        }
        catch (const YAML::Exception &)
        {
            error(node, "field '" + field + "' has invalid value '" +
                                node.Scalar() + "'");
        }
    }

    ChipletCoord coord(const YAML::Node &node, const std::string &field) const
    {
        if (!node.IsSequence() || node.size() != 2)
        {
            error(node, "field '" + field + "' entries must be [x, y] pairs");
        }
        try
        {
            const auto x = node[0].as<std::int64_t>();
            const auto y = node[1].as<std::int64_t>();
            if (x < 0 || y < 0 || x > 0xFFFF || y > 0xFFFF)
            {
                error(node, "field '" + field + "' coordinate out of range");
            }
            return {static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y)};
        }
        catch (const YAML::Exception &)
        {
            error(node, "field '" + field + "' coordinates must be integers");
        }
    }

private:
    std::string source_;
};

} // namespace

WaferConfig parse_config(const std::string &text, const std::string &source_name)
{
    YAML::Node root;
    try
    {
        root = YAML::Load(text);
    }
    catch (const YAML::ParserException &e)
    {
        throw ParseError(source_name, e.mark.line + 1, e.msg);
    }

    const Reader r(source_name);
    WaferConfig cfg;
    if (root.IsNull())
    {
        cfg.sync_domains = default_sync_domains(cfg.grid_width, cfg.grid_height);
        return cfg;
    }
    r.expect_map(root, "",
            {"grid", "chiplet", "clock_hz", "link", "energy", "step_policy",
                    "sync_domains"});

    if (const auto grid = root["grid"])
    {
        r.expect_map(grid, "grid", {"width", "height"});
        r.read(grid, "width", "grid.width", cfg.grid_width);
        r.read(grid, "height", "grid.height", cfg.grid_height);
    }
    if (const auto chiplet = root["chiplet"])
    {
        r.expect_map(chiplet, "chiplet",
                {"neuron_capacity", "synapse_capacity", "sops_per_cycle",
                        "parallelism"});
        r.read(chiplet, "neuron_capacity", "chiplet.neuron_capacity",
                cfg.neuron_capacity_per_chiplet);
        r.read(chiplet, "synapse_capacity", "chiplet.synapse_capacity",
                cfg.synapse_capacity_per_chiplet);
        r.read(chiplet, "sops_per_cycle", "chiplet.sops_per_cycle",
                cfg.sops_per_cycle_per_chiplet);
        r.read(chiplet, "parallelism", "chiplet.parallelism", cfg.parallelism);
    }
    r.read(root, "clock_hz", "clock_hz", cfg.clock_hz);
    if (const auto link = root["link"])
    {
        r.expect_map(link, "link",
                {"phase_cycles", "fifo_depth", "relay_threshold_hops",
                        "relay_occupancy_trigger"});
        r.read(link, "phase_cycles", "link.phase_cycles", cfg.link_phase_cycles);
        r.read(link, "fifo_depth", "link.fifo_depth", cfg.link_fifo_depth);
        r.read(link, "relay_threshold_hops", "link.relay_threshold_hops",
                cfg.relay_threshold_hops);
        r.read(link, "relay_occupancy_trigger", "link.relay_occupancy_trigger",
                cfg.relay_occupancy_trigger);
    }
    if (const auto energy = root["energy"])
    {
        r.expect_map(energy, "energy", {"energy_per_sop_pj", "static_power_w"});
        r.read(energy, "energy_per_sop_pj", "energy.energy_per_sop_pj",
                cfg.energy_per_sop_pj);
        r.read(energy, "static_power_w", "energy.static_power_w",
                cfg.static_power_w);
    }
    if (const auto policy = root["step_policy"])
    {
        r.expect_map(policy, "step_policy", {"initial", "smoothing", "min", "max"});
        r.read(policy, "initial", "step_policy.initial",
                cfg.step_policy.initial_budget);
        r.read(policy, "smoothing", "step_policy.smoothing",
                cfg.step_policy.smoothing);
        r.read(policy, "min", "step_policy.min", cfg.step_policy.min_budget);
        r.read(policy, "max", "step_policy.max", cfg.step_policy.max_budget);
    }

    if (const auto domains = root["sync_domains"])
    {
        if (!domains.IsSequence())
        {
            r.error(domains, "field 'sync_domains' must be a list");
        }
        for (const auto &node : domains)
        {
            r.expect_map(node, "sync_domains[]", {"id", "global_master", "members"});
            SyncDomain domain;
            domain.id = static_cast<std::uint32_t>(cfg.sync_domains.size());
            r.read(node, "id", "sync_domains[].id", domain.id);
            r.read(node, "global_master", "sync_domains[].global_master",
                    domain.global_master);
            const auto members = node["members"];
            if (!members || !members.IsSequence())
            {
                r.error(node, "field 'sync_domains[].members' must be a list");
            }
            for (const auto &m : members)
            {
                domain.members.push_back(r.coord(m, "sync_domains[].members"));
            }
            cfg.sync_domains.push_back(std::move(domain));
        }
    }
    else
    {
        cfg.sync_domains = default_sync_domains(cfg.grid_width, cfg.grid_height);
    }
    return cfg;
}

WaferConfig load_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ValidationError("cannot open config file '" + path.string() + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    WaferConfig cfg = parse_config(text.str(), path.string());
    const auto violations = validate_config(cfg);
    if (!violations.empty())
    {
        std::string msg = path.string() + ": invalid config:";
        for (const auto &v : violations)
        {
            msg += " " + v + ";";
        }
        msg.pop_back();
        throw ValidationError(msg);
    }
    return cfg;
}

std::string format_config(const WaferConfig &cfg)
{
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "grid" << YAML::Value << YAML::Flow << YAML::BeginMap
        << YAML::Key << "width" << YAML::Value << cfg.grid_width
        << YAML::Key << "height" << YAML::Value << cfg.grid_height
        << YAML::EndMap;
    out << YAML::Key << "chiplet" << YAML::Value << YAML::BeginMap
        << YAML::Key << "neuron_capacity" << YAML::Value << cfg.neuron_capacity_per_chiplet
        << YAML::Key << "synapse_capacity" << YAML::Value << cfg.synapse_capacity_per_chiplet
        << YAML::Key << "sops_per_cycle" << YAML::Value << cfg.sops_per_cycle_per_chiplet
        << YAML::Key << "parallelism" << YAML::Value << cfg.parallelism
        << YAML::EndMap;
    out << YAML::Key << "clock_hz" << YAML::Value << cfg.clock_hz;
    out << YAML::Key << "link" << YAML::Value << YAML::BeginMap
        << YAML::Key << "phase_cycles" << YAML::Value << cfg.link_phase_cycles
        << YAML::Key << "fifo_depth" << YAML::Value << cfg.link_fifo_depth
        << YAML::Key << "relay_threshold_hops" << YAML::Value << cfg.relay_threshold_hops
        << YAML::Key << "relay_occupancy_trigger" << YAML::Value << cfg.relay_occupancy_trigger
        << YAML::EndMap;
    out << YAML::Key << "energy" << YAML::Value << YAML::BeginMap
        << YAML::Key << "energy_per_sop_pj" << YAML::Value << cfg.energy_per_sop_pj
        << YAML::Key << "static_power_w" << YAML::Value << cfg.static_power_w
        << YAML::EndMap;
    out << YAML::Key << "step_policy" << YAML::Value << YAML::BeginMap
        << YAML::Key << "initial" << YAML::Value << cfg.step_policy.initial_budget
        << YAML::Key << "smoothing" << YAML::Value << cfg.step_policy.smoothing
        << YAML::Key << "min" << YAML::Value << cfg.step_policy.min_budget
        << YAML::Key << "max" << YAML::Value << cfg.step_policy.max_budget
        << YAML::EndMap;
    out << YAML::Key << "sync_domains" << YAML::Value << YAML::BeginSeq;
    for (const SyncDomain &domain : cfg.sync_domains)
    {
        out << YAML::BeginMap << YAML::Key << "id" << YAML::Value << domain.id
            << YAML::Key << "global_master" << YAML::Value << domain.global_master
            << YAML::Key << "members" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (const ChipletCoord &c : domain.members)
        {
            out << YAML::Flow << YAML::BeginSeq << c.x << c.y << YAML::EndSeq;
        }
        out << YAML::EndSeq << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

void save_config(const WaferConfig &cfg, const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
    {
        throw ValidationError("cannot write config file '" + path.string() + "'");
    }
    out << format_config(cfg);
}

} // namespace wafersim
