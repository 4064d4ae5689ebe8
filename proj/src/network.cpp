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

#include "wafersim/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "wafersim/error.hpp"

namespace wafersim
{

std::vector<std::vector<std::uint32_t>> Placement::members() const
{
    std::vector<std::vector<std::uint32_t>> result(
            static_cast<std::size_t>(grid_width) * grid_height);
    for (std::size_t n = 0; n < chiplet_of.size(); ++n)
    {
        auto &list = result.at(chiplet_index(chiplet_of[n], grid_width));
        const NeuronIndex local = local_of[n];
        if (list.size() <= local)
        {
            list.resize(local + 1, std::numeric_limits<std::uint32_t>::max());
        }
        list[local] = static_cast<std::uint32_t>(n);
    }
    return result;
}

std::size_t Placement::occupied_chiplets() const
{
    return static_cast<std::size_t>(std::count_if(chiplet_neurons.begin(),
            chiplet_neurons.end(), [](std::uint64_t n) { return n > 0; }));
}

std::vector<std::string> Network::check() const
{
    std::vector<std::string> problems;
    const std::size_t n = size();
    if (offsets.size() != n + 1 || offsets.front() != 0 ||
            offsets.back() != targets.size())
    {
        problems.emplace_back("synapse offsets do not match neuron/synapse counts");
        return problems;
    }
    if (weights.size() != targets.size())
    {
        problems.emplace_back("weight and target arrays differ in length");
    }
    if (!std::is_sorted(offsets.begin(), offsets.end()))
    {
        problems.emplace_back("synapse offsets are not monotone");
    }
    for (std::size_t i = 0; i < targets.size(); ++i)
    {
        if (targets[i] >= n)
        {
            problems.push_back("synapse " + std::to_string(i) + " targets unknown neuron " +
                    std::to_string(targets[i]));
            break;
        }
    }
    if (!region_of.empty())
    {
        if (region_of.size() != n)
        {
            problems.emplace_back("region labels do not cover every neuron");
        }
        else if (std::any_of(region_of.begin(), region_of.end(),
                         [this](std::uint32_t r) { return r >= region_names.size(); }))
        {
            problems.emplace_back("region label out of range");
        }
    }
    for (std::size_t i = 0; i < n; ++i)
    {
        const auto bad = check_neuron_params(params[i]);
        if (!bad.empty())
        {
            problems.push_back("neuron " + std::to_string(i) + ": " + bad.front());
            break;
        }
    }
    if (placement && (placement->chiplet_of.size() != n || placement->local_of.size() != n))
    {
        problems.emplace_back("placement does not cover every neuron");
    }
    return problems;
}

NetworkBuilder::NetworkBuilder(NeuronParams defaults)
        : defaults_(defaults)
{
}

std::uint32_t NetworkBuilder::add_neurons(std::uint32_t count)
{
    return add_neurons(count, defaults_);
}

std::uint32_t NetworkBuilder::add_neurons(std::uint32_t count, const NeuronParams &params)
{
    const auto first = static_cast<std::uint32_t>(params_.size());
    params_.insert(params_.end(), count, params);
    return first;
}

void NetworkBuilder::set_params(std::uint32_t neuron, const NeuronParams &params)
{
    params_.at(neuron) = params;
}

std::uint32_t NetworkBuilder::add_region(
        const std::string &name, std::uint32_t first, std::uint32_t end)
{
    auto it = std::find(region_names_.begin(), region_names_.end(), name);
    const auto id = static_cast<std::uint32_t>(it - region_names_.begin());
    if (it == region_names_.end())
    {
        region_names_.push_back(name);
    }
    if (region_of_.size() < params_.size())
    {
        region_of_.resize(params_.size(), std::numeric_limits<std::uint32_t>::max());
    }
    for (std::uint32_t n = first; n < end && n < region_of_.size(); ++n)
    {
        region_of_[n] = id;
    }
    return id;
}

void NetworkBuilder::add_synapse(std::uint32_t src, std::uint32_t dst, Weight weight)
{
    edges_.push_back(Edge{src, dst, weight});
}

Network NetworkBuilder::build() const
{
    Network net;
    net.defaults = defaults_;
    net.params = params_;
    net.region_names = region_names_;
    if (!region_names_.empty())
    {
        net.region_of = region_of_;
        net.region_of.resize(params_.size(), std::numeric_limits<std::uint32_t>::max());
    }
    const std::size_t n = params_.size();
    net.offsets.assign(n + 1, 0);
    for (const Edge &e : edges_)
    {
        if (e.src >= n)
        {
            throw ValidationError("synapse source " + std::to_string(e.src) +
                    " is not a neuron");
        }
        ++net.offsets[e.src + 1];
    }
    for (std::size_t i = 0; i < n; ++i)
    {
        net.offsets[i + 1] += net.offsets[i];
    }
    net.targets.resize(edges_.size());
    net.weights.resize(edges_.size());
    std::vector<std::uint64_t> cursor(net.offsets.begin(), net.offsets.end() - 1);
    for (const Edge &e : edges_)
    {
        const std::uint64_t slot = cursor[e.src]++;
        net.targets[slot] = e.dst;
        net.weights[slot] = e.weight;
    }
    return net;
}

Placement make_placement(const Network &network, std::uint32_t grid_width,
        std::uint32_t grid_height, std::vector<ChipletCoord> chiplet_of,
        std::vector<NeuronIndex> local_of)
{
    Placement p;
    p.grid_width = grid_width;
    p.grid_height = grid_height;
    p.chiplet_of = std::move(chiplet_of);
    p.local_of = std::move(local_of);
    p.chiplet_neurons.assign(static_cast<std::size_t>(grid_width) * grid_height, 0);
    p.chiplet_synapses.assign(p.chiplet_neurons.size(), 0);
    for (std::size_t n = 0; n < p.chiplet_of.size(); ++n)
    {
        const ChipletCoord c = p.chiplet_of[n];
        if (c.x >= grid_width || c.y >= grid_height)
        {
            continue;
        }
        const std::size_t idx = chiplet_index(c, grid_width);
        ++p.chiplet_neurons[idx];
        p.chiplet_synapses[idx] += network.out_degree(static_cast<std::uint32_t>(n));
    }
    return p;
}

std::vector<std::string> check_placement(const Network &network,
        const Placement &placement, const WaferConfig &cfg, double utilization)
{
    std::vector<std::string> problems;
    const std::size_t n = network.size();
    if (placement.chiplet_of.size() != n || placement.local_of.size() != n)
    {
        problems.emplace_back("placement does not cover every neuron exactly once");
        return problems;
    }
    if (placement.grid_width != cfg.grid_width || placement.grid_height != cfg.grid_height)
    {
        problems.push_back("placement grid " + std::to_string(placement.grid_width) + "x" +
                std::to_string(placement.grid_height) + " differs from config grid " +
                std::to_string(cfg.grid_width) + "x" + std::to_string(cfg.grid_height));
        return problems;
    }
    std::vector<std::vector<bool>> seen(cfg.chiplet_count());
    std::vector<std::uint64_t> neurons(cfg.chiplet_count(), 0);
    std::vector<std::uint64_t> synapses(cfg.chiplet_count(), 0);
    for (std::size_t i = 0; i < n; ++i)
    {
        const ChipletCoord c = placement.chiplet_of[i];
        if (!cfg.contains(c))
        {
            problems.push_back("neuron " + std::to_string(i) + " placed outside the grid");
            return problems;
        }
        const std::size_t idx = chiplet_index(c, cfg.grid_width);
        ++neurons[idx];
        synapses[idx] += network.out_degree(static_cast<std::uint32_t>(i));
    }
    for (std::size_t i = 0; i < n; ++i)
    {
        const std::size_t idx = chiplet_index(placement.chiplet_of[i], cfg.grid_width);
        const NeuronIndex local = placement.local_of[i];
        auto &used = seen[idx];
        if (used.empty())
        {
            used.assign(neurons[idx], false);
        }
        if (local >= used.size() || used[local])
        {
            problems.push_back("local indices on chiplet " + std::to_string(idx) +
                    " are not contiguous and unique");
            return problems;
        }
        used[local] = true;
    }
    const auto neuron_cap = static_cast<std::uint64_t>(std::floor(
            static_cast<double>(cfg.neuron_capacity_per_chiplet) * utilization));
    const auto synapse_cap = static_cast<std::uint64_t>(std::floor(
            static_cast<double>(cfg.synapse_capacity_per_chiplet) * utilization));
    for (std::size_t idx = 0; idx < neurons.size(); ++idx)
    {
        if (neurons[idx] > neuron_cap)
        {
            problems.push_back("chiplet " + std::to_string(idx) + " holds " +
                    std::to_string(neurons[idx]) + " neurons (capacity " +
                    std::to_string(neuron_cap) + ")");
        }
        if (synapses[idx] > synapse_cap)
        {
            problems.push_back("chiplet " + std::to_string(idx) + " holds " +
                    std::to_string(synapses[idx]) + " synapses (capacity " +
                    std::to_string(synapse_cap) + ")");
        }
    }
    return problems;
}

namespace
{

std::string strip_comment(const std::string &line)
{
    const auto hash = line.find('#');
    return hash == std::string::npos ? line : line.substr(0, hash);
}

std::vector<std::string> tokens_of(const std::string &line)
{
    std::istringstream in(strip_comment(line));
    std::vector<std::string> tokens;
    std::string token;
    while (in >> token)
    {
        tokens.push_back(token);
    }
    return tokens;
}

class LineParser
{
public:
    LineParser(std::string source)
            : source_(std::move(source))
    {
    }
    void at(std::size_t line) { line_ = line; }

    [[noreturn]] void fail(const std::string &detail) const
    {
        throw ParseError(source_, line_, detail);
    }

    template <typename T>
    T number(const std::string &token, const char *field) const
    {
        T value{};
        const char *begin = token.data();
        const char *end = begin + token.size();
        if (!token.empty() && token[0] == '+')
        {
            ++begin;
        }
        const auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc() || ptr != end)
        {
            fail(std::string("field '") + field + "': invalid number '" + token + "'");
        }
        return value;
    }

    void apply_param(NeuronParams &params, const std::string &kv) const
    {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
        {
            fail("expected key=value, got '" + kv + "'");
        }
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        if (key == "threshold")
        {
            params.threshold = number<Potential>(value, "threshold");
        }
        else if (key == "reset")
        {
            params.reset = number<Potential>(value, "reset");
        }
        else if (key == "refractory")
        {
            params.refractory_period = number<std::uint32_t>(value, "refractory");
        }
        else if (key == "v0")
        {
            params.v_init = number<Potential>(value, "v0");
        }
        else if (key == "leak")
        {
            const auto slash = value.find('/');
            if (slash == std::string::npos)
            {
                fail("field 'leak' must be num/den");
            }
            params.leak_num = number<std::uint32_t>(value.substr(0, slash), "leak");
            params.leak_den = number<std::uint32_t>(value.substr(slash + 1), "leak");
        }
        else
        {
            fail("unknown neuron parameter '" + key + "'");
        }
    }

private:
    std::string source_;
    std::size_t line_{0};
};

std::string param_string(const NeuronParams &p)
{
    std::ostringstream out;
    out << "threshold=" << p.threshold << " reset=" << p.reset << " leak=" << p.leak_num
        << "/" << p.leak_den << " refractory=" << p.refractory_period << " v0=" << p.v_init;
    return out.str();
}

Weight to_weight(const LineParser &parser, const std::string &token)
{
    const auto w = parser.number<std::int64_t>(token, "weight");
    if (w < std::numeric_limits<Weight>::min() || w > std::numeric_limits<Weight>::max())
    {
        parser.fail("weight " + token + " exceeds the 16-bit signed range");
    }
    return static_cast<Weight>(w);
}

} // namespace

std::string format_network(const Network &network)
{
    std::ostringstream out;
    out << "wafersim-network 1\n";
    out << "neurons " << network.size() << "\n";
    if (network.placement)
    {
        out << "grid " << network.placement->grid_width << " "
            << network.placement->grid_height << "\n";
    }
    out << "defaults " << param_string(network.defaults) << "\n";

    if (!network.region_of.empty())
    {
        std::size_t begin = 0;
        const std::size_t n = network.size();
        while (begin < n)
        {
            std::size_t end = begin + 1;
            while (end < n && network.region_of[end] == network.region_of[begin])
            {
                ++end;
            }
            out << "region " << network.region_names.at(network.region_of[begin]) << " "
                << begin << " " << end << "\n";
            begin = end;
        }
    }
    for (std::size_t i = 0; i < network.size(); ++i)
    {
        if (!(network.params[i] == network.defaults))
        {
            out << "param " << i << " " << param_string(network.params[i]) << "\n";
        }
    }
    if (network.placement)
    {
        const auto members = network.placement->members();
        for (std::size_t idx = 0; idx < members.size(); ++idx)
        {
            const ChipletCoord c = chiplet_at(idx, network.placement->grid_width);
            const auto &list = members[idx];
            std::size_t begin = 0;
            while (begin < list.size())
            {
                std::size_t end = begin + 1;
                while (end < list.size() && list[end] == list[end - 1] + 1)
                {
                    ++end;
                }
                out << "place " << list[begin] << " " << list[end - 1] + 1 << " " << c.x
                    << " " << c.y << "\n";
                begin = end;
            }
        }
    }
    for (std::size_t src = 0; src < network.size(); ++src)
    {
        for (std::uint64_t s = network.offsets[src]; s < network.offsets[src + 1]; ++s)
        {
            const std::uint32_t dst = network.targets[s];
            if (network.placement)
            {
                const ChipletCoord c = network.placement->chiplet_of[dst];
                out << "syn " << src << " " << c.x << " " << c.y << " "
                    << network.placement->local_of[dst] << " " << network.weights[s]
                    << "\n";
            }
            else
            {
                out << "edge " << src << " " << dst << " " << network.weights[s] << "\n";
            }
        }
    }
    return out.str();
}

Network parse_network(const std::string &text, const std::string &source_name)
{
    LineParser parser(source_name);
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    std::optional<std::uint32_t> count;
    std::optional<std::pair<std::uint32_t, std::uint32_t>> grid;
    NeuronParams defaults;
    std::vector<std::pair<std::uint32_t, std::vector<std::string>>> overrides;
    struct RegionLine
    {
        std::string name;
        std::uint32_t first, end;
    };
    std::vector<RegionLine> regions;
    struct PlaceLine
    {
        std::uint32_t first, end;
        ChipletCoord chiplet;
        std::size_t line;
    };
    std::vector<PlaceLine> places;
    struct SynLine
    {
        std::uint32_t src;
        ChipletCoord chiplet;
        NeuronIndex local;
        Weight weight;
        std::size_t line;
    };
    std::vector<SynLine> syns;
    struct EdgeLine
    {
        std::uint32_t src, dst;
        Weight weight;
    };
    std::vector<EdgeLine> edges;

    auto need = [&](const std::vector<std::string> &t, std::size_t n) {
        if (t.size() != n)
        {
            parser.fail("'" + t[0] + "' expects " + std::to_string(n - 1) + " fields, got " +
                    std::to_string(t.size() - 1));
        }
    };
    auto neuron_id = [&](const std::string &token, const char *field) {
        const auto id = parser.number<std::uint32_t>(token, field);
        if (!count || id >= *count)
        {
            parser.fail(std::string("field '") + field + "': neuron " + token +
                    " out of range");
        }
        return id;
    };

    while (std::getline(in, line))
    {
        ++line_no;
        parser.at(line_no);
        const auto t = tokens_of(line);
        if (t.empty())
        {
            continue;
        }
        if (!header)
        {
            if (t.size() != 2 || t[0] != "wafersim-network" || t[1] != "1")
            {
                parser.fail("expected header 'wafersim-network 1'");
            }
            header = true;
            continue;
        }
        const std::string &kind = t[0];
        if (kind == "neurons")
        {
            need(t, 2);
            count = parser.number<std::uint32_t>(t[1], "neurons");
        }
        else if (kind == "grid")
        {
            need(t, 3);
            grid = {parser.number<std::uint32_t>(t[1], "grid width"),
                    parser.number<std::uint32_t>(t[2], "grid height")};
        }
        else if (kind == "defaults")
        {
            for (std::size_t i = 1; i < t.size(); ++i)
            {
                parser.apply_param(defaults, t[i]);
            }
        }
        else if (kind == "param")
        {
            if (t.size() < 2)
            {
                parser.fail("'param' expects a neuron id");
            }
            const auto id = neuron_id(t[1], "param");
            for (std::size_t i = 2; i < t.size(); ++i)
            {
                NeuronParams scratch;
                parser.apply_param(scratch, t[i]);
            }
            overrides.emplace_back(id, std::vector<std::string>(t.begin() + 2, t.end()));
        }
        else if (kind == "region")
        {
            need(t, 4);
            const auto first = parser.number<std::uint32_t>(t[2], "region first");
            const auto end = parser.number<std::uint32_t>(t[3], "region end");
            if (!count || first >= end || end > *count)
            {
                parser.fail("region range [" + t[2] + "," + t[3] + ") invalid");
            }
            regions.push_back({t[1], first, end});
        }
        else if (kind == "place")
        {
            need(t, 5);
            const auto first = parser.number<std::uint32_t>(t[1], "place first");
            const auto end = parser.number<std::uint32_t>(t[2], "place end");
            if (!count || first >= end || end > *count)
            {
                parser.fail("place range [" + t[1] + "," + t[2] + ") invalid");
            }
            const ChipletCoord c{parser.number<std::uint32_t>(t[3], "place x"),
                    parser.number<std::uint32_t>(t[4], "place y")};
            places.push_back({first, end, c, line_no});
        }
        else if (kind == "syn")
        {
            need(t, 6);
            const auto src = neuron_id(t[1], "syn src");
            const ChipletCoord c{parser.number<std::uint32_t>(t[2], "syn dst_x"),
                    parser.number<std::uint32_t>(t[3], "syn dst_y")};
            syns.push_back({src, c, parser.number<NeuronIndex>(t[4], "syn dst_neuron"),
                    to_weight(parser, t[5]), line_no});
        }
        else if (kind == "edge")
        {
            need(t, 4);
            edges.push_back({neuron_id(t[1], "edge src"), neuron_id(t[2], "edge dst"),
                    to_weight(parser, t[3])});
        }
        else
        {
            parser.fail("unknown record '" + kind + "'");
        }
    }
    parser.at(0);
    if (!header)
    {
        parser.fail("missing header 'wafersim-network 1'");
    }
    if (!count)
    {
        parser.fail("missing 'neurons' record");
    }
    if (!syns.empty() && !edges.empty())
    {
        parser.fail("a network uses either 'syn' or 'edge' records, not both");
    }
    if (!syns.empty() && places.empty())
    {
        parser.fail("'syn' records require a placement ('place' records)");
    }

    NetworkBuilder builder(defaults);
    builder.add_neurons(*count);
    for (const auto &[id, kvs] : overrides)
    {
        NeuronParams p = defaults;
        for (const auto &kv : kvs)
        {
            parser.apply_param(p, kv);
        }
        builder.set_params(id, p);
    }
    for (const auto &r : regions)
    {
        builder.add_region(r.name, r.first, r.end);
    }

    std::optional<Placement> placement;
    std::map<std::pair<ChipletCoord, NeuronIndex>, std::uint32_t> by_location;
    if (!places.empty())
    {
        if (!grid)
        {
            parser.fail("'place' records require a 'grid' record");
        }
        std::vector<ChipletCoord> chiplet_of(*count);
        std::vector<NeuronIndex> local_of(*count);
        std::vector<bool> placed(*count, false);
        std::map<ChipletCoord, NeuronIndex> next_local;
        for (const PlaceLine &p : places)
        {
            parser.at(p.line);
            if (p.chiplet.x >= grid->first || p.chiplet.y >= grid->second)
            {
                parser.fail("place chiplet outside the declared grid");
            }
            NeuronIndex &next = next_local[p.chiplet];
            for (std::uint32_t n = p.first; n < p.end; ++n)
            {
                if (placed[n])
                {
                    parser.fail("neuron " + std::to_string(n) + " placed twice");
                }
                placed[n] = true;
                chiplet_of[n] = p.chiplet;
                local_of[n] = next++;
                by_location.emplace(std::make_pair(p.chiplet, local_of[n]), n);
            }
        }
        parser.at(0);
        if (std::find(placed.begin(), placed.end(), false) != placed.end())
        {
            parser.fail("placement does not cover every neuron");
        }
        placement = Placement{grid->first, grid->second, std::move(chiplet_of),
                std::move(local_of), {}, {}};
    }

    builder.reserve_synapses(syns.size() + edges.size());
    for (const SynLine &s : syns)
    {
        const auto it = by_location.find({s.chiplet, s.local});
        if (it == by_location.end())
        {
            parser.at(s.line);
            parser.fail("syn destination does not name a placed neuron");
        }
        builder.add_synapse(s.src, it->second, s.weight);
    }
    for (const EdgeLine &e : edges)
    {
        builder.add_synapse(e.src, e.dst, e.weight);
    }
    Network net = builder.build();
    if (std::find(net.region_of.begin(), net.region_of.end(),
                std::numeric_limits<std::uint32_t>::max()) != net.region_of.end())
    {
        parser.fail("region records do not label every neuron");
    }
    if (placement)
    {
        net.placement = make_placement(net, placement->grid_width, placement->grid_height,
                std::move(placement->chiplet_of), std::move(placement->local_of));
    }
    const auto problems = net.check();
    if (!problems.empty())
    {
        throw ValidationError(source_name + ": " + problems.front());
    }
    return net;
}

std::string read_text_file(const std::filesystem::path &path, const char *what)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw ValidationError(std::string("cannot open ") + what + " file '" +
                path.string() + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

void write_text_file(const std::filesystem::path &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw ValidationError("cannot write '" + path.string() + "'");
    }
    out << text;
}

Network load_network(const std::filesystem::path &path)
{
    return parse_network(read_text_file(path, "network"), path.string());
}

void save_network(const Network &network, const std::filesystem::path &path)
{
    write_text_file(path, format_network(network));
}

std::string format_placement(const Placement &placement)
{
    std::ostringstream out;
    out << "# neuron x y local\n";
    for (std::size_t n = 0; n < placement.chiplet_of.size(); ++n)
    {
        out << n << " " << placement.chiplet_of[n].x << " " << placement.chiplet_of[n].y
            << " " << placement.local_of[n] << "\n";
    }
    return out.str();
}

Stimulus parse_stimulus(const std::string &text, const std::string &source_name)
{
    LineParser parser(source_name);
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    Stimulus stimulus;
    while (std::getline(in, line))
    {
        ++line_no;
        parser.at(line_no);
        const auto t = tokens_of(line);
        if (t.empty())
        {
            continue;
        }
        if (t.size() != 5)
        {
            parser.fail("expected 'step x y neuron weight'");
        }
        stimulus.push_back(StimulusEntry{parser.number<StepIndex>(t[0], "step"),
                {parser.number<std::uint32_t>(t[1], "x"),
                        parser.number<std::uint32_t>(t[2], "y")},
                parser.number<NeuronIndex>(t[3], "neuron"),
                parser.number<std::int32_t>(t[4], "weight")});
    }
    return stimulus;
}

Stimulus load_stimulus(const std::filesystem::path &path)
{
    return parse_stimulus(read_text_file(path, "stimulus"), path.string());
}

std::string format_stimulus(const Stimulus &stimulus)
{
    std::ostringstream out;
    for (const StimulusEntry &s : stimulus)
    {
        out << s.step << " " << s.chiplet.x << " " << s.chiplet.y << " " << s.neuron << " "
            << s.weight << "\n";
    }
    return out.str();
}

} // namespace wafersim
