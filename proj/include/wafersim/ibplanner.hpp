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

// ibplanner.hpp - interposer bump planning between adjacent chiplets.
//
// Geometry file (lengths in mm, '#' starts a comment):
//
//   pitch 0.1
//   fanout 3
//   delay_ps_per_mm 6.7
//   res_ohm_per_mm 25
//   cap_pf_per_mm 0.2
//   chiplet <name> <x> <y> <width> <height>
//   band <chiplet> <width>                    optional floorplan section
//   central <chiplet> <x0> <y0> <x1> <y1>     die-relative
//   bump <chiplet> <x> <y> SIGNAL|POWER       die-relative
//
// Netlist file:
//
//   net <name> <chiplet>.<pin> <chiplet>.<pin> SIGNAL|POWER <slack_ns>
//
// Coordinates are held as integer micrometres so path lengths and totals
// compare exactly.
#ifndef WAFERSIM_IBPLANNER_HPP_
#define WAFERSIM_IBPLANNER_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace wafersim
{

using Micron = std::int64_t;

struct Point
{
    Micron x{0};
    Micron y{0};

    bool operator==(const Point &) const = default;
};

struct ChipletRect
{
    std::string name;
    Micron x{0};
    Micron y{0};
    Micron width{0};
    Micron height{0};
};

struct WireConstants
{
    double delay_ps_per_mm{6.7};
    double res_ohm_per_mm{25.0};
    double cap_pf_per_mm{0.2};
};

enum class NetClass
{
    signal,
    power,
};

struct Bump
{
    Point at;
    NetClass role{NetClass::signal};
};

struct ChipletBumps
{
    std::string chiplet;
    Micron width{0};
    Micron height{0};
    Micron band{0};
    Point central_lo;
    Point central_hi;
    std::vector<Bump> bumps;
};

struct BumpPlan
{
    std::vector<ChipletBumps> chiplets;
};

struct Geometry
{
    std::vector<ChipletRect> chiplets;
    Micron pitch{100};
    std::uint32_t fanout{1};
    WireConstants wire;
    BumpPlan bumps;
};

Micron to_micron(double mm);
double to_mm(Micron um);

Geometry parse_geometry(const std::string &text, const std::string &source_name = "<geometry>");
Geometry load_geometry(const std::filesystem::path &path);

struct PathCandidate
{
    std::uint32_t id{0};
    // Indices into Geometry::chiplets, a < b.
    std::uint32_t chiplet_a{0};
    std::uint32_t chiplet_b{0};
    std::uint32_t lane{0};
    Point from;
    Point to;
    Micron length{0};

    [[nodiscard]] double length_mm() const { return to_mm(length); }
    [[nodiscard]] double delay_ns(const WireConstants &w) const;
    [[nodiscard]] double resistance_ohm(const WireConstants &w) const;
    [[nodiscard]] double capacitance_pf(const WireConstants &w) const;
};

// Throws ValidationError on overlapping footprints or a non-positive pitch.
std::vector<PathCandidate> enumerate_paths(const Geometry &geometry);

struct Net
{
    std::string name;
    std::string src_chiplet;
    std::string src_pin;
    std::string dst_chiplet;
    std::string dst_pin;
    NetClass kind{NetClass::signal};
    // POWER nets carry no timing constraint.
    double slack_ns{0.0};
};

struct Netlist
{
    std::vector<Net> nets;
};

Netlist parse_netlist(const std::string &text, const std::string &source_name = "<netlist>");
Netlist load_netlist(const std::filesystem::path &path);

enum class AssignAlgorithm
{
    hungarian,
    greedy,
};

struct NetAssignment
{
    std::uint32_t net{0};
    std::uint32_t path{0};
    Micron length{0};
    double delay_ns{0.0};
    // slack - delay; +inf for POWER nets.
    double margin_ns{0.0};
};

struct Assignment
{
    // In netlist order.
    std::vector<NetAssignment> nets;
    Micron total_length{0};
};

// Nets are grouped by chiplet pair and matched only to that pair's paths.
// Throws InfeasibleError naming the blocking nets.
Assignment assign_nets(const Netlist &netlist, const Geometry &geometry,
        const std::vector<PathCandidate> &paths, AssignAlgorithm algorithm);

// Minimum-cost perfect matching of a square matrix; result[row] = column.
std::vector<std::size_t> hungarian(const std::vector<std::int64_t> &cost, std::size_t n);

// One chiplet-pair group as a general matrix: length and delay of routing
// net i over path j. assign_nets fills rows from the path alone; callers
// may supply per-net costs (for example pin-dependent escape routing).
struct GroupInstance
{
    std::size_t nets{0};
    std::size_t paths{0};
    std::vector<Micron> length;
    std::vector<double> delay_ns;
    // +inf for unconstrained nets.
    std::vector<double> slack_ns;

    [[nodiscard]] bool feasible(std::size_t net, std::size_t path) const
    {
        return delay_ns[net * paths + path] <= slack_ns[net];
    }
};

inline constexpr std::size_t unassigned = static_cast<std::size_t>(-1);

struct GroupSolution
{
    // Path index per net, `unassigned` for blocking nets.
    std::vector<std::size_t> path_of;
    Micron total_length{0};
    std::vector<std::size_t> blocking;
};

// GREEDY: nets by ascending slack (stable), each takes the cheapest
// remaining feasible path. HUNGARIAN: fewest blocking nets, then minimum
// total length.
GroupSolution solve_group(const GroupInstance &group, AssignAlgorithm algorithm);

struct PinLoad
{
    std::string net;
    std::string pin;
    double resistance_ohm{0.0};
    double capacitance_pf{0.0};
    double delay_ns{0.0};
    double margin_ns{0.0};
};

std::vector<PinLoad> estimate_parasitics(const Assignment &assignment, const Netlist &netlist,
        const std::vector<PathCandidate> &paths, const WireConstants &wire);

std::string format_assignment(const Assignment &assignment, const Netlist &netlist,
        const Geometry &geometry, const std::vector<PathCandidate> &paths);
std::string format_feedback(const std::vector<PinLoad> &loads);

struct FloorplanViolation
{
    std::string chiplet;
    Point at;
    NetClass role{NetClass::signal};
    std::string message;
};

std::vector<FloorplanViolation> check_floorplan(const BumpPlan &plan);

} // namespace wafersim

#endif
