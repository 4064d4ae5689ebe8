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

#include "wafersim/ibplanner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "wafersim/error.hpp"
#include "wafersim/network.hpp"

namespace wafersim
{

Micron to_micron(double mm)
{
    return static_cast<Micron>(std::llround(mm * 1000.0));
}

double to_mm(Micron um)
{
    return static_cast<double>(um) / 1000.0;
}

double PathCandidate::delay_ns(const WireConstants &w) const
{
    return length_mm() * w.delay_ps_per_mm / 1000.0;
}

double PathCandidate::resistance_ohm(const WireConstants &w) const
{
    return length_mm() * w.res_ohm_per_mm;
}

double PathCandidate::capacitance_pf(const WireConstants &w) const
{
    return length_mm() * w.cap_pf_per_mm;
}

namespace
{

struct Lines
{
    std::string source;
    std::size_t line{0};

    [[noreturn]] void fail(const std::string &detail) const
    {
        throw ParseError(source, line, detail);
    }

    double real(const std::string &token, const char *field) const
    {
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value))
        {
            fail(std::string("field '") + field + "': invalid number '" + token + "'");
        }
        return value;
    }

    Micron length(const std::string &token, const char *field) const
    {
        return to_micron(real(token, field));
    }

    NetClass role(const std::string &token) const
    {
        if (token == "SIGNAL")
        {
            return NetClass::signal;
        }
        if (token == "POWER")
        {
            return NetClass::power;
        }
        fail("expected SIGNAL or POWER, got '" + token + "'");
    }

    void arity(const std::vector<std::string> &tokens, std::size_t n) const
    {
        if (tokens.size() != n)
        {
            fail("'" + tokens[0] + "' expects " + std::to_string(n - 1) + " fields, got " +
                    std::to_string(tokens.size() - 1));
        }
    }
};

template <typename Fn>
void for_each_line(const std::string &text, Lines &lines, Fn &&fn)
{
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw))
    {
        ++lines.line;
        const auto hash = raw.find('#');
        std::istringstream words(hash == std::string::npos ? raw : raw.substr(0, hash));
        std::vector<std::string> tokens;
        std::string token;
        while (words >> token)
        {
            tokens.push_back(token);
        }
        if (!tokens.empty())
        {
            fn(tokens);
        }
    }
}

ChipletBumps &bumps_of(Geometry &g, const std::string &name, const Lines &lines)
{
    for (auto &c : g.bumps.chiplets)
    {
        if (c.chiplet == name)
        {
            return c;
        }
    }
    for (const auto &c : g.chiplets)
    {
        if (c.name == name)
        {
            ChipletBumps b;
            b.chiplet = name;
            b.width = c.width;
            b.height = c.height;
            g.bumps.chiplets.push_back(b);
            return g.bumps.chiplets.back();
        }
    }
    lines.fail("unknown chiplet '" + name + "'");
}

} // namespace

Geometry parse_geometry(const std::string &text, const std::string &source_name)
{
    Geometry g;
    Lines lines{source_name};
    std::set<std::string> names;
    for_each_line(text, lines, [&](const std::vector<std::string> &t) {
        const std::string &key = t[0];
        if (key == "pitch")
        {
            lines.arity(t, 2);
            g.pitch = lines.length(t[1], "pitch");
        }
        else if (key == "fanout")
        {
            lines.arity(t, 2);
            const double f = lines.real(t[1], "fanout");
            if (f < 1 || f != std::floor(f) || f > 1e6)
            {
                lines.fail("fanout must be a positive integer");
            }
            g.fanout = static_cast<std::uint32_t>(f);
        }
        else if (key == "delay_ps_per_mm")
        {
            lines.arity(t, 2);
            g.wire.delay_ps_per_mm = lines.real(t[1], "delay_ps_per_mm");
        }
        else if (key == "res_ohm_per_mm")
        {
            lines.arity(t, 2);
            g.wire.res_ohm_per_mm = lines.real(t[1], "res_ohm_per_mm");
        }
        else if (key == "cap_pf_per_mm")
        {
            lines.arity(t, 2);
            g.wire.cap_pf_per_mm = lines.real(t[1], "cap_pf_per_mm");
        }
        else if (key == "chiplet")
        {
            lines.arity(t, 6);
            if (!names.insert(t[1]).second)
            {
                lines.fail("duplicate chiplet '" + t[1] + "'");
            }
            ChipletRect r{t[1], lines.length(t[2], "x"), lines.length(t[3], "y"),
                    lines.length(t[4], "width"), lines.length(t[5], "height")};
            if (r.width <= 0 || r.height <= 0)
            {
                lines.fail("chiplet '" + t[1] + "' must have positive size");
            }
            g.chiplets.push_back(r);
        }
        else if (key == "band")
        {
            lines.arity(t, 3);
            bumps_of(g, t[1], lines).band = lines.length(t[2], "band");
        }
        else if (key == "central")
        {
            lines.arity(t, 6);
            ChipletBumps &b = bumps_of(g, t[1], lines);
            b.central_lo = {lines.length(t[2], "x0"), lines.length(t[3], "y0")};
            b.central_hi = {lines.length(t[4], "x1"), lines.length(t[5], "y1")};
        }
        else if (key == "bump")
        {
            lines.arity(t, 5);
            const Bump bump{{lines.length(t[2], "x"), lines.length(t[3], "y")}, lines.role(t[4])};
            bumps_of(g, t[1], lines).bumps.push_back(bump);
        }
        else
        {
            lines.fail("unknown geometry record '" + key + "'");
        }
    });
    if (g.pitch <= 0)
    {
        throw ValidationError("geometry: pitch must be positive");
    }
    for (const double c : {g.wire.delay_ps_per_mm, g.wire.res_ohm_per_mm, g.wire.cap_pf_per_mm})
    {
        if (c < 0)
        {
            throw ValidationError("geometry: per-mm wire constants must be non-negative");
        }
    }
    return g;
}

Geometry load_geometry(const std::filesystem::path &path)
{
    return parse_geometry(read_text_file(path, "geometry"), path.string());
}

std::vector<PathCandidate> enumerate_paths(const Geometry &geometry)
{
    if (geometry.pitch <= 0)
    {
        throw ValidationError("pitch must be positive");
    }
    const auto &cs = geometry.chiplets;
    for (std::size_t a = 0; a < cs.size(); ++a)
    {
        for (std::size_t b = a + 1; b < cs.size(); ++b)
        {
            const bool apart = cs[a].x + cs[a].width <= cs[b].x ||
                    cs[b].x + cs[b].width <= cs[a].x || cs[a].y + cs[a].height <= cs[b].y ||
                    cs[b].y + cs[b].height <= cs[a].y;
            if (!apart)
            {
                throw ValidationError(
                        "overlapping chiplet footprints: " + cs[a].name + " and " + cs[b].name);
            }
        }
    }

    // Open rectangle strictly between two facing edges.
    auto blocked = [&cs](std::size_t a, std::size_t b, Micron x0, Micron y0, Micron x1,
                           Micron y1) {
        for (std::size_t k = 0; k < cs.size(); ++k)
        {
            if (k == a || k == b)
            {
                continue;
            }
            if (cs[k].x < x1 && cs[k].x + cs[k].width > x0 && cs[k].y < y1 &&
                    cs[k].y + cs[k].height > y0)
            {
                return true;
            }
        }
        return false;
    };

    std::vector<PathCandidate> paths;
    for (std::size_t a = 0; a < cs.size(); ++a)
    {
        for (std::size_t b = a + 1; b < cs.size(); ++b)
        {
            const ChipletRect &p = cs[a];
            const ChipletRect &q = cs[b];
            const Micron ox0 = std::max(p.x, q.x);
            const Micron ox1 = std::min(p.x + p.width, q.x + q.width);
            const Micron oy0 = std::max(p.y, q.y);
            const Micron oy1 = std::min(p.y + p.height, q.y + q.height);
            Point from;
            Point to;
            bool horizontal = false;
            if (ox1 > ox0)
            {
                // Stacked vertically.
                const bool p_below = p.y + p.height <= q.y;
                const Micron lo = p_below ? p.y + p.height : q.y + q.height;
                const Micron hi = p_below ? q.y : p.y;
                if (hi > lo && blocked(a, b, ox0, lo, ox1, hi))
                {
                    continue;
                }
                const Micron mid = ox0 + (ox1 - ox0) / 2;
                from = {mid, p_below ? lo : hi};
                to = {mid, p_below ? hi : lo};
            }
            else if (oy1 > oy0)
            {
                const bool p_left = p.x + p.width <= q.x;
                const Micron lo = p_left ? p.x + p.width : q.x + q.width;
                const Micron hi = p_left ? q.x : p.x;
                if (hi > lo && blocked(a, b, lo, oy0, hi, oy1))
                {
                    continue;
                }
                const Micron mid = oy0 + (oy1 - oy0) / 2;
                from = {p_left ? lo : hi, mid};
                to = {p_left ? hi : lo, mid};
                horizontal = true;
            }
            else
            {
                continue;
            }
            for (std::uint32_t lane = 0; lane < geometry.fanout; ++lane)
            {
                PathCandidate path;
                path.id = static_cast<std::uint32_t>(paths.size());
                path.chiplet_a = static_cast<std::uint32_t>(a);
                path.chiplet_b = static_cast<std::uint32_t>(b);
                path.lane = lane;
                const Micron shift = static_cast<Micron>(lane) * geometry.pitch;
                path.from = from;
                path.to = to;
                if (horizontal)
                {
                    path.from.y += shift;
                    path.to.y += shift;
                }
                else
                {
                    path.from.x += shift;
                    path.to.x += shift;
                }
                path.length = std::llabs(path.to.x - path.from.x) +
                        std::llabs(path.to.y - path.from.y) + shift;
                paths.push_back(path);
            }
        }
    }
    std::stable_sort(paths.begin(), paths.end(), [](const PathCandidate &l, const PathCandidate &r) {
        return l.length != r.length ? l.length < r.length : l.id < r.id;
    });
    return paths;
}

Netlist parse_netlist(const std::string &text, const std::string &source_name)
{
    Netlist netlist;
    Lines lines{source_name};
    std::set<std::string> names;
    auto split_pin = [&lines](const std::string &token, std::string &chiplet, std::string &pin) {
        const auto dot = token.find('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == token.size())
        {
            lines.fail("expected <chiplet>.<pin>, got '" + token + "'");
        }
        chiplet = token.substr(0, dot);
        pin = token.substr(dot + 1);
    };
    for_each_line(text, lines, [&](const std::vector<std::string> &t) {
        if (t[0] != "net")
        {
            lines.fail("unknown netlist record '" + t[0] + "'");
        }
        lines.arity(t, 6);
        Net net;
        net.name = t[1];
        split_pin(t[2], net.src_chiplet, net.src_pin);
        split_pin(t[3], net.dst_chiplet, net.dst_pin);
        net.kind = lines.role(t[4]);
        net.slack_ns = lines.real(t[5], "slack");
        if (!names.insert(net.name).second)
        {
            lines.fail("duplicate net '" + net.name + "'");
        }
        if (t[2] == t[3])
        {
            lines.fail("net '" + net.name + "' connects a pin to itself");
        }
        if (net.kind == NetClass::signal && net.slack_ns < 0)
        {
            lines.fail("net '" + net.name + "' has negative slack");
        }
        netlist.nets.push_back(net);
    });
    return netlist;
}

Netlist load_netlist(const std::filesystem::path &path)
{
    return parse_netlist(read_text_file(path, "netlist"), path.string());
}

std::vector<std::size_t> hungarian(const std::vector<std::int64_t> &cost, std::size_t n)
{
    // Shortest augmenting path with potentials; 1-based internally.
    constexpr std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
    std::vector<std::int64_t> u(n + 1, 0);
    std::vector<std::int64_t> v(n + 1, 0);
    std::vector<std::size_t> match(n + 1, 0);
    std::vector<std::size_t> way(n + 1, 0);
    for (std::size_t row = 1; row <= n; ++row)
    {
        match[0] = row;
        std::size_t col0 = 0;
        std::vector<std::int64_t> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do
        {
            used[col0] = true;
            const std::size_t r = match[col0];
            std::int64_t delta = inf;
            std::size_t col1 = 0;
            for (std::size_t c = 1; c <= n; ++c)
            {
                if (used[c])
                {
                    continue;
                }
                const std::int64_t cur = cost[(r - 1) * n + (c - 1)] - u[r] - v[c];
                if (cur < minv[c])
                {
                    minv[c] = cur;
                    way[c] = col0;
                }
                if (minv[c] < delta)
                {
                    delta = minv[c];
                    col1 = c;
                }
            }
            for (std::size_t c = 0; c <= n; ++c)
            {
                if (used[c])
                {
                    u[match[c]] += delta;
                    v[c] -= delta;
                }
                else
                {
                    minv[c] -= delta;
                }
            }
            col0 = col1;
        } while (match[col0] != 0);
        do
        {
            const std::size_t col1 = way[col0];
            match[col0] = match[col1];
            col0 = col1;
        } while (col0 != 0);
    }
    std::vector<std::size_t> result(n, 0);
    for (std::size_t c = 1; c <= n; ++c)
    {
        if (match[c] != 0)
        {
            result[match[c] - 1] = c - 1;
        }
    }
    return result;
}

namespace
{

std::string join_names(const Netlist &netlist, const std::vector<std::uint32_t> &nets)
{
    std::string out;
    for (const std::uint32_t n : nets)
    {
        if (!out.empty())
        {
            out += ", ";
        }
        out += netlist.nets[n].name;
    }
    return out;
}

} // namespace

GroupSolution solve_group(const GroupInstance &group, AssignAlgorithm algorithm)
{
    GroupSolution solution;
    solution.path_of.assign(group.nets, unassigned);
    if (algorithm == AssignAlgorithm::greedy)
    {
        std::vector<std::size_t> order(group.nets);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&group](std::size_t l, std::size_t r) {
            return group.slack_ns[l] < group.slack_ns[r];
        });
        std::vector<bool> taken(group.paths, false);
        for (const std::size_t net : order)
        {
            std::size_t best = unassigned;
            for (std::size_t p = 0; p < group.paths; ++p)
            {
                if (taken[p] || !group.feasible(net, p))
                {
                    continue;
                }
                if (best == unassigned ||
                        group.length[net * group.paths + p] < group.length[net * group.paths + best])
                {
                    best = p;
                }
            }
            if (best == unassigned)
            {
                solution.blocking.push_back(net);
                continue;
            }
            taken[best] = true;
            solution.path_of[net] = best;
            solution.total_length += group.length[net * group.paths + best];
        }
        std::sort(solution.blocking.begin(), solution.blocking.end());
        return solution;
    }

    // Square instance padded with dummy rows/columns. An infeasible or
    // dummy cell costs more than any set of real lengths, so the optimum
    // first minimises the number of unassignable nets.
    const std::size_t n = std::max(group.nets, group.paths);
    std::int64_t big = 1;
    for (const Micron l : group.length)
    {
        big = std::max<std::int64_t>(big, l + 1);
    }
    big *= static_cast<std::int64_t>(n) + 1;
    std::vector<std::int64_t> cost(n * n, 0);
    for (std::size_t r = 0; r < group.nets; ++r)
    {
        for (std::size_t c = 0; c < n; ++c)
        {
            cost[r * n + c] = c < group.paths && group.feasible(r, c)
                    ? group.length[r * group.paths + c]
                    : big;
        }
    }
    const std::vector<std::size_t> match = hungarian(cost, n);
    for (std::size_t r = 0; r < group.nets; ++r)
    {
        if (cost[r * n + match[r]] >= big)
        {
            solution.blocking.push_back(r);
        }
        else
        {
            solution.path_of[r] = match[r];
            solution.total_length += cost[r * n + match[r]];
        }
    }
    return solution;
}

Assignment assign_nets(const Netlist &netlist, const Geometry &geometry,
        const std::vector<PathCandidate> &paths, AssignAlgorithm algorithm)
{
    std::map<std::string, std::uint32_t> index;
    for (std::size_t i = 0; i < geometry.chiplets.size(); ++i)
    {
        index[geometry.chiplets[i].name] = static_cast<std::uint32_t>(i);
    }
    auto chiplet = [&index](const Net &net, const std::string &name) {
        const auto it = index.find(name);
        if (it == index.end())
        {
            throw ValidationError("net '" + net.name + "' names unknown chiplet '" + name + "'");
        }
        return it->second;
    };

    // Group key (a, b) with a < b; std::map keeps group order deterministic.
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::uint32_t>> groups;
    for (std::size_t i = 0; i < netlist.nets.size(); ++i)
    {
        const Net &net = netlist.nets[i];
        std::uint32_t a = chiplet(net, net.src_chiplet);
        std::uint32_t b = chiplet(net, net.dst_chiplet);
        if (a == b)
        {
            throw ValidationError("net '" + net.name + "' does not cross chiplets");
        }
        if (a > b)
        {
            std::swap(a, b);
        }
        groups[{a, b}].push_back(static_cast<std::uint32_t>(i));
    }

    Assignment result;
    result.nets.resize(netlist.nets.size());
    std::vector<std::uint32_t> blocking;
    for (const auto &[key, members] : groups)
    {
        // Already in (length, id) order.
        std::vector<std::uint32_t> lanes;
        for (std::size_t p = 0; p < paths.size(); ++p)
        {
            if (paths[p].chiplet_a == key.first && paths[p].chiplet_b == key.second)
            {
                lanes.push_back(static_cast<std::uint32_t>(p));
            }
        }
        GroupInstance group;
        group.nets = members.size();
        group.paths = lanes.size();
        for (const std::uint32_t net : members)
        {
            const Net &n = netlist.nets[net];
            group.slack_ns.push_back(n.kind == NetClass::power
                            ? std::numeric_limits<double>::infinity()
                            : n.slack_ns);
            for (const std::uint32_t p : lanes)
            {
                group.length.push_back(paths[p].length);
                group.delay_ns.push_back(paths[p].delay_ns(geometry.wire));
            }
        }
        const GroupSolution solution = solve_group(group, algorithm);
        for (std::size_t i = 0; i < members.size(); ++i)
        {
            const std::uint32_t net = members[i];
            if (solution.path_of[i] == unassigned)
            {
                blocking.push_back(net);
                continue;
            }
            const PathCandidate &path = paths[lanes[solution.path_of[i]]];
            NetAssignment &slot = result.nets[net];
            slot.net = net;
            slot.path = path.id;
            slot.length = path.length;
            slot.delay_ns = path.delay_ns(geometry.wire);
            slot.margin_ns = group.slack_ns[i] - slot.delay_ns;
            result.total_length += path.length;
        }
    }
    if (!blocking.empty())
    {
        std::sort(blocking.begin(), blocking.end());
        throw InfeasibleError("no feasible path assignment; blocking nets: " +
                join_names(netlist, blocking));
    }
    return result;
}

std::vector<PinLoad> estimate_parasitics(const Assignment &assignment, const Netlist &netlist,
        const std::vector<PathCandidate> &paths, const WireConstants &wire)
{
    std::map<std::uint32_t, const PathCandidate *> by_id;
    for (const auto &p : paths)
    {
        by_id[p.id] = &p;
    }
    std::vector<PinLoad> loads;
    for (const NetAssignment &a : assignment.nets)
    {
        const Net &net = netlist.nets[a.net];
        const PathCandidate &path = *by_id.at(a.path);
        for (const auto &pin : {net.src_chiplet + "." + net.src_pin,
                     net.dst_chiplet + "." + net.dst_pin})
        {
            loads.push_back({net.name, pin, path.resistance_ohm(wire), path.capacitance_pf(wire),
                    path.delay_ns(wire), a.margin_ns});
        }
    }
    return loads;
}

namespace
{

std::string fixed(double v, int digits)
{
    if (std::isinf(v))
    {
        return v > 0 ? "inf" : "-inf";
    }
    std::ostringstream out;
    out.precision(digits);
    out << std::fixed << v;
    return out.str();
}

} // namespace

std::string format_assignment(const Assignment &assignment, const Netlist &netlist,
        const Geometry &geometry, const std::vector<PathCandidate> &paths)
{
    std::map<std::uint32_t, const PathCandidate *> by_id;
    for (const auto &p : paths)
    {
        by_id[p.id] = &p;
    }
    std::ostringstream out;
    out << "# net path chiplet_a chiplet_b lane length_mm delay_ns margin_ns\n";
    for (const NetAssignment &a : assignment.nets)
    {
        const PathCandidate &p = *by_id.at(a.path);
        out << netlist.nets[a.net].name << ' ' << p.id << ' ' << geometry.chiplets[p.chiplet_a].name
            << ' ' << geometry.chiplets[p.chiplet_b].name << ' ' << p.lane << ' '
            << fixed(to_mm(a.length), 3) << ' ' << fixed(a.delay_ns, 6) << ' '
            << fixed(a.margin_ns, 6) << '\n';
    }
    out << "total_length_mm " << fixed(to_mm(assignment.total_length), 3) << '\n';
    return out.str();
}

std::string format_feedback(const std::vector<PinLoad> &loads)
{
    std::ostringstream out;
    out << "# net pin r_ohm c_pf delay_ns margin_ns\n";
    for (const PinLoad &l : loads)
    {
        out << l.net << ' ' << l.pin << ' ' << fixed(l.resistance_ohm, 6) << ' '
            << fixed(l.capacitance_pf, 6) << ' ' << fixed(l.delay_ns, 6) << ' '
            << fixed(l.margin_ns, 6) << '\n';
    }
    return out.str();
}

std::vector<FloorplanViolation> check_floorplan(const BumpPlan &plan)
{
    std::vector<FloorplanViolation> violations;
    for (const ChipletBumps &c : plan.chiplets)
    {
        for (const Bump &b : c.bumps)
        {
            const Point p = b.at;
            const std::string where = "(" + fixed(to_mm(p.x), 3) + ", " + fixed(to_mm(p.y), 3) + ")";
            if (b.role == NetClass::signal)
            {
                const bool in_band = p.x <= c.band || p.y <= c.band || p.x >= c.width - c.band ||
                        p.y >= c.height - c.band;
                if (!in_band)
                {
                    violations.push_back({c.chiplet, p, b.role,
                            "SIGNAL bump at " + where + " lies outside the peripheral band"});
                }
            }
            else
            {
                const bool central = p.x >= c.central_lo.x && p.x <= c.central_hi.x &&
                        p.y >= c.central_lo.y && p.y <= c.central_hi.y;
                if (!central)
                {
                    violations.push_back({c.chiplet, p, b.role,
                            "POWER bump at " + where + " lies outside the central region"});
                }
            }
        }
    }
    return violations;
}

} // namespace wafersim
