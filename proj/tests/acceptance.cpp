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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "wafersim/config.hpp"
#include "wafersim/connectome.hpp"
#include "wafersim/error.hpp"
#include "wafersim/golden.hpp"
#include "wafersim/ibplanner.hpp"
#include "wafersim/kernel.hpp"
#include "wafersim/mapper.hpp"
#include "wafersim/metrics.hpp"
#include "wafersim/noc.hpp"
#include "wafersim/report.hpp"
#include "wafersim/rng.hpp"
#include "wafersim/spearman.hpp"

#include "support.hpp"

using namespace wafersim;

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double rel_error(double got, double want)
{
    return std::abs(got - want) / std::abs(want);
}

struct Verdict
{
    bool pass{false};
    std::string detail;
};

std::string fmt(const char *format, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

// One neuron per chiplet on the full default wafer, each with `fan`
// synapses onto itself (weight 0) and a supra-threshold input every step,
// so every chiplet retires exactly `fan` SOPs per step and never talks to
// the mesh. The CSR is filled directly to keep peak memory low.
Network self_loop_wafer(const WaferConfig &cfg, std::uint64_t fan)
{
    const std::size_t n = cfg.chiplet_count();
    Network net;
    net.params.assign(n, net.defaults);
    net.offsets.resize(n + 1);
    net.targets.resize(n * fan);
    net.weights.assign(n * fan, 0);
    for (std::size_t i = 0; i < n; ++i)
    {
        net.offsets[i + 1] = (i + 1) * fan;
        std::fill(net.targets.begin() + static_cast<std::ptrdiff_t>(i * fan),
                net.targets.begin() + static_cast<std::ptrdiff_t>((i + 1) * fan),
                static_cast<std::uint32_t>(i));
    }
    std::vector<ChipletCoord> chiplet_of(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        chiplet_of[i] = chiplet_at(i, cfg.grid_width);
    }
    net.placement = make_placement(net, cfg.grid_width, cfg.grid_height, std::move(chiplet_of),
            std::vector<NeuronIndex>(n, 0));
    return net;
}

Stimulus drive_every_step(const Network &net, StepIndex steps)
{
    Stimulus s;
    for (StepIndex t = 0; t < steps; ++t)
    {
        for (std::size_t i = 0; i < net.size(); ++i)
        {
            s.push_back({t, net.placement->chiplet_of[i], 0, 1000});
        }
    }
    std::sort(s.begin(), s.end());
    return s;
}

Verdict energy_calibration()
{
    const auto start = Clock::now();
    const WaferConfig cfg = default_config();
    const StepIndex steps = 1000;
    const Network net = self_loop_wafer(cfg, 15'625);
    const RunResult r = run(cfg, net, drive_every_step(net, steps), steps, 1);
    const SimReport m = compute_metrics(r.report, cfg);
    const double want = 4.9e-3;
    const double err = rel_error(m.metrics->dynamic_energy_j, want);
    const double elapsed = seconds_since(start);
    return {r.report.total_sops == 1'000'000'000ULL && err <= 1e-4 && elapsed < 60.0,
            fmt("sops=%llu dynamic=%.9g J (rel err %.2e, tol 1e-4) runtime=%.1f s",
                    static_cast<unsigned long long>(r.report.total_sops),
                    m.metrics->dynamic_energy_j, err, elapsed)};
}

Verdict throughput_calibration()
{
    WaferConfig cfg = default_config();
    // Budget starts at the floor so the step length is the compute time.
    cfg.step_policy.min_budget = 1;
    cfg.step_policy.initial_budget = 1;
    const StepIndex steps = 10;
    const Network net = self_loop_wafer(cfg, cfg.sops_per_cycle_per_chiplet * 650);
    const RunResult r = run(cfg, net, drive_every_step(net, steps), steps, 1);

    const SimReport dyn = compute_metrics(r.report, cfg);
    const double throughput = dyn.metrics->throughput_sops;
    const double t_err = rel_error(throughput, 64e12);
    const double dynamic_w = dyn.metrics->dynamic_energy_j / dyn.metrics->model_time_s;

    // Static power chosen so the total draw is 100 W.
    cfg.static_power_w = 100.0 - dynamic_w;
    const SimReport tot = compute_metrics(r.report, cfg);
    const double eff = tot.metrics->efficiency_sops_per_w;
    const double e_err = rel_error(eff, 0.64e12);
    return {t_err <= 2e-3 && e_err <= 1e-2,
            fmt("throughput=%.6g SOPS (rel err %.2e, tol 2e-3); dynamic=%.2f W static=%.2f W "
                "total=%.2f W efficiency=%.6g SOPS/W (rel err %.2e, tol 1e-2)",
                    throughput, t_err, dynamic_w, cfg.static_power_w, tot.metrics->average_power_w,
                    eff, e_err)};
}

// Criteria 3 and 4 share the same 200 runs.
struct OracleRuns
{
    std::size_t scenarios{0};
    std::size_t trace_mismatches{0};
    std::size_t barrier_violations{0};
    std::size_t quiescence_violations{0};
    std::uint64_t spikes{0};
    std::uint64_t remote_events{0};
    double seconds{0.0};
    std::string error;
};

OracleRuns oracle_runs()
{
    OracleRuns o;
    const auto start = Clock::now();
    try
    {
        for (std::uint64_t seed = 1; seed <= 200; ++seed)
        {
            const testing::Scenario s = testing::random_scenario(seed);
            RunOptions opt;
            opt.debug = true;
            const RunResult r = run(s.cfg, s.network, s.stimulus, s.steps, seed, opt);
            const SpikeTrace g = golden_run(s.network, s.stimulus, s.steps);
            if (format_trace(r.trace) != format_trace(g))
            {
                ++o.trace_mismatches;
            }
            o.barrier_violations += r.report.barrier_violations + count_barrier_violations(r.phase_log);
            o.quiescence_violations += r.report.quiescence_violations;
            o.spikes += r.report.total_spikes;
            o.remote_events += r.report.events_delivered;
            ++o.scenarios;
        }
    }
    catch (const std::exception &e)
    {
        o.error = e.what();
    }
    o.seconds = seconds_since(start);
    return o;
}

Verdict oracle_equivalence(const OracleRuns &o)
{
    return {o.error.empty() && o.scenarios == 200 && o.trace_mismatches == 0 && o.seconds < 600.0,
            fmt("scenarios=%zu mismatches=%zu spikes=%llu remote_events=%llu runtime=%.1f s%s%s",
                    o.scenarios, o.trace_mismatches, static_cast<unsigned long long>(o.spikes),
                    static_cast<unsigned long long>(o.remote_events), o.seconds,
                    o.error.empty() ? "" : " error: ", o.error.c_str())};
}

Verdict barrier_safety(const OracleRuns &o)
{
    return {o.error.empty() && o.scenarios == 200 && o.barrier_violations == 0 &&
                    o.quiescence_violations == 0,
            fmt("scenarios=%zu barrier_violations=%zu quiescence_violations=%zu", o.scenarios,
                    o.barrier_violations, o.quiescence_violations)};
}

Verdict noc_delivery()
{
    const std::uint64_t total = 1'000'000;
    Rng rng(2024);
    std::uint64_t injected = 0;
    std::uint64_t delivered = 0;
    std::uint64_t relayed = 0;
    std::uint64_t misdelivered = 0;
    std::uint64_t duplicates = 0;
    std::uint64_t conservation_failures = 0;
    std::uint64_t steps = 0;
    while (injected < total)
    {
        MeshParams p;
        p.width = static_cast<std::uint32_t>(rng.between(2, 16));
        p.height = static_cast<std::uint32_t>(rng.between(2, 16));
        p.fifo_depth = static_cast<std::uint32_t>(rng.between(1, 4));
        // Aggressive rule: any long first-leg packet facing a busy output
        // switches channel.
        p.relay = RelayRule{1, 0};
        p.arbitration_seed = rng.next();
        Mesh mesh(p);
        EventQueue queue;
        std::vector<ChipletCoord> expected;
        std::vector<std::uint8_t> seen;
        std::vector<Delivery> out;
        Cycle now = 0;
        for (int step = 0; step < 8 && injected < total; ++step, ++steps)
        {
            const auto batch = std::min<std::uint64_t>(total - injected, rng.between(100, 4000));
            for (std::uint64_t k = 0; k < batch; ++k)
            {
                const ChipletCoord src{static_cast<std::uint32_t>(rng.below(p.width)),
                        static_cast<std::uint32_t>(rng.below(p.height))};
                const ChipletCoord dst{static_cast<std::uint32_t>(rng.below(p.width)),
                        static_cast<std::uint32_t>(rng.below(p.height))};
                AerEvent e;
                e.dx = static_cast<std::int32_t>(dst.x) - static_cast<std::int32_t>(src.x);
                e.dy = static_cast<std::int32_t>(dst.y) - static_cast<std::int32_t>(src.y);
                e.dst_neuron = static_cast<NeuronIndex>(rng.below(1u << 22));
                e.step_tag = step_tag_of(static_cast<StepIndex>(step));
                mesh.inject(src, e, now + rng.below(64), queue);
                expected.push_back(dst);
                seen.push_back(0);
            }
            injected += batch;
            out.clear();
            while (!queue.empty())
            {
                const SimEvent ev = queue.pop();
                now = std::max(now, ev.cycle);
                mesh.handle(ev, queue, out);
            }
            for (const Delivery &d : out)
            {
                const std::uint64_t id = d.packet.id;
                if (id >= expected.size() || d.at != expected[id] || d.packet.destination != expected[id])
                {
                    ++misdelivered;
                    continue;
                }
                if (seen[id]++ != 0)
                {
                    ++duplicates;
                }
                relayed += d.packet.event.relayed ? 1 : 0;
            }
            delivered += out.size();
            if (mesh.injected() != mesh.delivered() || !mesh.empty())
            {
                ++conservation_failures;
            }
            mesh.reset_wakes();
            ++now;
        }
        if (std::count(seen.begin(), seen.end(), 0) != 0)
        {
            ++conservation_failures;
        }
    }
    const double relay_share = static_cast<double>(relayed) / static_cast<double>(injected);
    return {injected == total && delivered == total && misdelivered == 0 && duplicates == 0 &&
                    conservation_failures == 0 && relay_share >= 0.10,
            fmt("events=%llu delivered=%llu relayed=%.1f%% misdelivered=%llu duplicates=%llu "
                "conservation_failures=%llu steps=%llu",
                    static_cast<unsigned long long>(injected),
                    static_cast<unsigned long long>(delivered), 100.0 * relay_share,
                    static_cast<unsigned long long>(misdelivered),
                    static_cast<unsigned long long>(duplicates),
                    static_cast<unsigned long long>(conservation_failures),
                    static_cast<unsigned long long>(steps))};
}

Verdict determinism()
{
    std::size_t scenarios = 0;
    std::size_t differing = 0;
    for (std::uint64_t seed = 500; seed < 520; ++seed)
    {
        const testing::Scenario s = testing::random_scenario(seed, {5000, 50000, 16, 8, 60});
        std::string first;
        for (const unsigned workers : {1u, 2u, 8u})
        {
            RunOptions opt;
            opt.workers = workers;
            const RunResult r = run(s.cfg, s.network, s.stimulus, s.steps, seed, opt);
            const std::string bytes = format_trace(r.trace) + format_report(r.report);
            if (workers == 1)
            {
                first = bytes;
            }
            else if (bytes != first)
            {
                ++differing;
            }
        }
        ++scenarios;
    }
    return {differing == 0, fmt("scenarios=%zu worker_counts=1,2,8 differing=%zu", scenarios, differing)};
}

// Exhaustive search: fewest unassigned nets, then shortest total length.
struct Best
{
    std::size_t blocking{std::numeric_limits<std::size_t>::max()};
    Micron length{std::numeric_limits<Micron>::max()};
};

void exhaustive(const GroupInstance &g, std::size_t net, std::vector<bool> &used,
        std::size_t blocking, Micron length, Best &best)
{
    if (net == g.nets)
    {
        if (blocking < best.blocking || (blocking == best.blocking && length < best.length))
        {
            best = {blocking, length};
        }
        return;
    }
    for (std::size_t p = 0; p < g.paths; ++p)
    {
        if (!used[p] && g.feasible(net, p))
        {
            used[p] = true;
            exhaustive(g, net + 1, used, blocking, length + g.length[net * g.paths + p], best);
            used[p] = false;
        }
    }
    exhaustive(g, net + 1, used, blocking + 1, length, best);
}

Best oracle(const GroupInstance &g)
{
    Best best;
    std::vector<bool> used(g.paths, false);
    exhaustive(g, 0, used, 0, 0, best);
    return best;
}

struct AssignTally
{
    std::size_t instances{0};
    std::size_t hungarian_mismatch{0};
    std::size_t greedy_shorter{0};
    std::size_t greedy_slack_violations{0};
    std::size_t greedy_worse{0};
};

void check_greedy(const GroupInstance &g, const GroupSolution &gr, const Best &best, AssignTally &t)
{
    for (std::size_t i = 0; i < g.nets; ++i)
    {
        if (gr.path_of[i] != unassigned && !g.feasible(i, gr.path_of[i]))
        {
            ++t.greedy_slack_violations;
        }
    }
    if (gr.blocking.size() == best.blocking)
    {
        if (gr.total_length < best.length)
        {
            ++t.greedy_shorter;
        }
        else if (gr.total_length > best.length)
        {
            ++t.greedy_worse;
        }
    }
}

// General per-(net, path) cost matrices.
void random_matrix_instances(std::size_t count, Rng &rng, AssignTally &t)
{
    for (std::size_t k = 0; k < count; ++k)
    {
        GroupInstance g;
        g.nets = static_cast<std::size_t>(rng.between(1, 7));
        g.paths = static_cast<std::size_t>(rng.between(1, 7));
        for (std::size_t i = 0; i < g.nets * g.paths; ++i)
        {
            const Micron len = rng.between(500, 5000);
            g.length.push_back(len);
            g.delay_ns.push_back(to_mm(len) * 6.7e-3 + rng.unit() * 0.01);
        }
        for (std::size_t i = 0; i < g.nets; ++i)
        {
            g.slack_ns.push_back(rng.below(6) == 0 ? std::numeric_limits<double>::infinity()
                                                   : 0.005 + rng.unit() * 0.04);
        }
        const Best best = oracle(g);
        const GroupSolution h = solve_group(g, AssignAlgorithm::hungarian);
        bool ok = h.blocking.size() == best.blocking && h.total_length == best.length;
        for (std::size_t i = 0; i < g.nets; ++i)
        {
            ok = ok && (h.path_of[i] == unassigned || g.feasible(i, h.path_of[i]));
        }
        t.hungarian_mismatch += ok ? 0 : 1;
        check_greedy(g, solve_group(g, AssignAlgorithm::greedy), best, t);
        ++t.instances;
    }
}

// Two dies with 1..7 lanes and 1..7 nets, through the full planner.
void random_geometry_instances(std::size_t count, Rng &rng, AssignTally &t)
{
    for (std::size_t k = 0; k < count; ++k)
    {
        Geometry geo;
        geo.fanout = static_cast<std::uint32_t>(rng.between(1, 7));
        geo.pitch = rng.between(50, 300);
        const Micron gap = rng.between(200, 3000);
        geo.chiplets.push_back({"a", 0, 0, 10'000, 10'000});
        geo.chiplets.push_back({"b", 10'000 + gap, rng.between(-5000, 5000), 10'000, 10'000});
        const auto paths = enumerate_paths(geo);
        Netlist nl;
        const auto nets = static_cast<std::size_t>(rng.between(1, 7));
        for (std::size_t i = 0; i < nets; ++i)
        {
            const bool power = rng.below(5) == 0;
            nl.nets.push_back({"n" + std::to_string(i), i % 2 ? "a" : "b", "p" + std::to_string(i),
                    i % 2 ? "b" : "a", "q" + std::to_string(i), power ? NetClass::power : NetClass::signal,
                    0.002 + rng.unit() * 0.03});
        }

        GroupInstance g;
        g.nets = nets;
        g.paths = paths.size();
        for (std::size_t i = 0; i < nets; ++i)
        {
            for (const auto &p : paths)
            {
                g.length.push_back(p.length);
                g.delay_ns.push_back(p.delay_ns(geo.wire));
            }
            g.slack_ns.push_back(nl.nets[i].kind == NetClass::power
                            ? std::numeric_limits<double>::infinity()
                            : nl.nets[i].slack_ns);
        }
        const Best best = oracle(g);

        bool ok = true;
        try
        {
            const Assignment a = assign_nets(nl, geo, paths, AssignAlgorithm::hungarian);
            ok = best.blocking == 0 && a.total_length == best.length;
            for (const auto &n : a.nets)
            {
                ok = ok && n.margin_ns >= 0.0;
            }
        }
        catch (const InfeasibleError &)
        {
            ok = best.blocking > 0;
        }
        t.hungarian_mismatch += ok ? 0 : 1;

        try
        {
            const Assignment a = assign_nets(nl, geo, paths, AssignAlgorithm::greedy);
            for (const auto &n : a.nets)
            {
                t.greedy_slack_violations += n.margin_ns < 0.0 ? 1 : 0;
            }
            if (best.blocking == 0 && a.total_length < best.length)
            {
                ++t.greedy_shorter;
            }
        }
        catch (const InfeasibleError &)
        {
        }
        ++t.instances;
    }
}

Verdict hungarian_optimality()
{
    Rng rng(77);
    AssignTally t;
    random_geometry_instances(250, rng, t);
    random_matrix_instances(250, rng, t);
    return {t.instances == 500 && t.hungarian_mismatch == 0 && t.greedy_shorter == 0 &&
                    t.greedy_slack_violations == 0,
            fmt("instances=%zu hungarian_mismatches=%zu greedy_shorter=%zu greedy_slack_violations=%zu "
                "greedy_strictly_worse=%zu",
                    t.instances, t.hungarian_mismatch, t.greedy_shorter, t.greedy_slack_violations,
                    t.greedy_worse)};
}

// Rank of each entry: 1 + #smaller + (#equal others) / 2.
double brute_spearman(const std::vector<double> &a, const std::vector<double> &b)
{
    const std::size_t n = a.size();
    auto ranks = [n](const std::vector<double> &v) {
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            double less = 0;
            double equal = 0;
            for (std::size_t j = 0; j < n; ++j)
            {
                less += v[j] < v[i] ? 1 : 0;
                equal += (j != i && v[j] == v[i]) ? 1 : 0;
            }
            r[i] = 1.0 + less + equal / 2.0;
        }
        return r;
    };
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    double ma = 0;
    double mb = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0;
    double saa = 0;
    double sbb = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0 || sbb == 0)
    {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return sab / std::sqrt(saa * sbb);
}

Verdict spearman_correctness()
{
    Rng rng(31);
    std::size_t pairs = 0;
    std::size_t mismatches = 0;
    std::size_t degenerate = 0;
    double worst = 0.0;
    for (; pairs < 1000; ++pairs)
    {
        const auto n = static_cast<std::size_t>(rng.between(2, 24));
        const bool exclude = rng.below(2) == 0;
        const std::uint64_t levels = rng.below(3) == 0 ? 4 : 1'000'000;
        Matrix a(n, n);
        Matrix b(n, n);
        for (std::size_t i = 0; i < n * n; ++i)
        {
            a.values[i] = static_cast<double>(rng.below(levels)) * 0.25;
            b.values[i] = rng.below(2) == 0 ? a.values[i] + rng.unit() : static_cast<double>(rng.below(levels));
        }
        std::vector<double> va;
        std::vector<double> vb;
        for (std::size_t r = 0; r < n; ++r)
        {
            for (std::size_t c = 0; c < n; ++c)
            {
                if (!exclude || r != c)
                {
                    va.push_back(a.at(r, c));
                    vb.push_back(b.at(r, c));
                }
            }
        }
        const double want = brute_spearman(va, vb);
        try
        {
            const double got = spearman(a, b, exclude).spearman_r;
            const double diff = std::isnan(want) ? 1.0 : std::abs(got - want);
            worst = std::max(worst, diff);
            mismatches += diff <= 1e-12 ? 0 : 1;
        }
        catch (const DegenerateError &)
        {
            ++degenerate;
            mismatches += std::isnan(want) ? 0 : 1;
        }
    }

    Matrix m(6, 6);
    for (std::size_t i = 0; i < m.values.size(); ++i)
    {
        m.values[i] = static_cast<double>((i * 7) % 11);
    }
    Matrix rev = m;
    for (double &v : rev.values)
    {
        v = -v;
    }
    const double same = spearman(m, m).spearman_r;
    const double opposite = spearman(m, rev).spearman_r;
    return {mismatches == 0 && same == 1.0 && opposite == -1.0,
            fmt("pairs=%zu mismatches=%zu degenerate=%zu max_abs_diff=%.2e identical=%.17g reversed=%.17g",
                    pairs, mismatches, degenerate, worst, same, opposite)};
}

Connectome random_connectome(std::size_t regions, std::uint64_t synapses, Rng &rng)
{
    Connectome c;
    for (std::size_t i = 0; i < regions; ++i)
    {
        c.regions.push_back({"r" + std::to_string(i), static_cast<std::uint64_t>(rng.between(200, 3000))});
    }
    c.weights = Matrix(regions, regions);
    for (double &w : c.weights.values)
    {
        // Heavy-tailed weights with some absent pairs.
        w = rng.below(8) == 0 ? 0.0 : std::pow(rng.unit(), 3.0) * 1000.0;
    }
    c.total_synapses = synapses;
    return c;
}

Connectome doubled(const Connectome &c)
{
    Connectome d;
    const std::size_t n = c.size();
    for (int copy = 0; copy < 2; ++copy)
    {
        for (const Region &r : c.regions)
        {
            d.regions.push_back({r.name + (copy == 0 ? "_a" : "_b"), r.neurons});
        }
    }
    d.weights = Matrix(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = 0; j < n; ++j)
        {
            d.weights.at(i, j) = c.weights.at(i, j);
            d.weights.at(n + i, n + j) = c.weights.at(i, j);
        }
    }
    d.total_synapses = 2 * c.total_synapses;
    return d;
}

Verdict mapping_fidelity()
{
    const WaferConfig cfg = default_config();
    Rng rng(9);
    const Connectome src = random_connectome(20, 100'000, rng);
    const Network net = synthesize_network(src, 4);
    Network placed = net;
    placed.placement = map_network(net, cfg).placement;
    const auto placement_problems = check_placement(placed, *placed.placement, cfg);
    const FidelityScore score = spearman(src.weights, reconstruct_connectivity(placed));

    const std::string data = WAFERSIM_DATA_DIR;
    const Connectome zebrafish = ingest_connectome(data + "/zebrafish.conn");
    const RegionMapping one = map_connectome(zebrafish, cfg);
    const RegionMapping two = map_connectome(doubled(zebrafish), cfg);
    const bool two_fit = two.chiplets.size() == 1 &&
            two.chiplet_neurons[0] <= cfg.neuron_capacity_per_chiplet &&
            two.chiplet_synapses[0] <= cfg.synapse_capacity_per_chiplet &&
            two.chiplet_neurons[0] == 2 * zebrafish.total_neurons();

    const Connectome mouse = ingest_connectome(data + "/mouse.conn");
    MappingOptions full;
    full.utilization = 1.0;
    const RegionMapping m = map_connectome(mouse, cfg, full);
    const auto lower_bound = (mouse.total_neurons() + cfg.neuron_capacity_per_chiplet - 1) /
            cfg.neuron_capacity_per_chiplet;

    // Per-pair rounding moves the realised total by at most half a synapse
    // per region pair.
    const auto drift = static_cast<double>(net.synapse_count()) - static_cast<double>(src.total_synapses);
    const bool within_rounding = std::abs(drift) <= 0.5 * static_cast<double>(src.weights.values.size());

    return {placement_problems.empty() && src.total_synapses == 100'000 && within_rounding &&
                    score.spearman_r >= 0.95 &&
                    zebrafish.total_neurons() == 70'000 && zebrafish.total_synapses == 640'000 &&
                    one.chiplets.size() == 1 && two_fit && mouse.total_neurons() == 9'500'000 &&
                    m.chiplets.size() >= 5 && m.chiplets.size() >= lower_bound,
            fmt("synthetic r=%.4f over %zu pairs (descriptor synapses=%llu, realised=%llu); zebrafish chiplets=%zu, "
                "two instances chiplets=%zu neurons=%llu synapses=%llu; mouse chiplets=%zu "
                "(capacity bound %llu)",
                    score.spearman_r, score.compared, static_cast<unsigned long long>(src.total_synapses),
                    static_cast<unsigned long long>(net.synapse_count()),
                    one.chiplets.size(), two.chiplets.size(),
                    static_cast<unsigned long long>(two.chiplet_neurons[0]),
                    static_cast<unsigned long long>(two.chiplet_synapses[0]), m.chiplets.size(),
                    static_cast<unsigned long long>(lower_bound))};
}

Verdict adaptive_step()
{
    WaferConfig cfg = default_config();
    cfg.grid_width = 1;
    cfg.grid_height = 1;
    cfg.sync_domains = default_sync_domains(1, 1);
    const std::uint64_t fan = cfg.sops_per_cycle_per_chiplet * 1000;
    cfg.step_policy = StepPolicy{1001, 0.5, 1, std::numeric_limits<std::uint32_t>::max()};

    // Neurons 0 and 1 drive `fan` weight-0 synapses each; neuron 1 joins
    // halfway, doubling the synaptic work per step.
    NetworkBuilder b;
    b.add_neurons(3);
    b.reserve_synapses(2 * fan);
    for (std::uint32_t src = 0; src < 2; ++src)
    {
        for (std::uint64_t k = 0; k < fan; ++k)
        {
            b.add_synapse(src, 2, 0);
        }
    }
    Network net = b.build();
    net.placement = make_placement(net, 1, 1, std::vector<ChipletCoord>(3), {0, 1, 2});
    const StepIndex steps = 60;
    Stimulus stim;
    for (StepIndex t = 0; t < steps; ++t)
    {
        stim.push_back({t, {0, 0}, 0, 1000});
        if (t >= steps / 2)
        {
            stim.push_back({t, {0, 0}, 1, 1000});
        }
    }
    const RunResult r = run(cfg, net, stim, steps, 1);
    const auto &rec = r.report.step_records;

    std::size_t change = 0;
    while (change + 1 < rec.size() && rec[change + 1].actual <= rec[change].actual)
    {
        ++change;
    }
    ++change;
    if (change >= rec.size())
    {
        return {false, "the per-step cost never changed"};
    }
    const double before = static_cast<double>(rec[change - 1].actual);
    const double after = static_cast<double>(rec[change].actual);
    bool monotone = true;
    bool clamped = false;
    std::size_t converged_at = rec.size();
    for (std::size_t i = change; i < rec.size(); ++i)
    {
        monotone = monotone && (i == change || rec[i].budget >= rec[i - 1].budget);
        clamped = clamped || rec[i].budget <= cfg.step_policy.min_budget ||
                rec[i].budget >= cfg.step_policy.max_budget;
        double new_max = 0;
        for (std::size_t j = change; j <= i; ++j)
        {
            new_max = std::max(new_max, static_cast<double>(rec[j].actual));
        }
        if (converged_at == rec.size() && std::abs(static_cast<double>(rec[i].budget) - new_max) <= 0.05 * new_max)
        {
            converged_at = i;
        }
    }
    const std::size_t within = converged_at - change;
    return {monotone && !clamped && within <= 10 && after / before > 1.9,
            fmt("cost %.0f -> %.0f cycles at step %zu; budget non-decreasing=%s clamped=%s; within 5%% "
                "after %zu steps (budget %llu)",
                    before, after, change, monotone ? "yes" : "no", clamped ? "yes" : "no", within,
                    static_cast<unsigned long long>(
                            converged_at < rec.size() ? rec[converged_at].budget : rec.back().budget))};
}

Verdict guarded(const std::function<Verdict()> &fn)
{
    try
    {
        return fn();
    }
    catch (const std::exception &e)
    {
        return {false, std::string("exception: ") + e.what()};
    }
}

} // namespace

int main(int argc, char **argv)
{
    // Optional arguments select criteria by number; default is all ten.
    std::vector<bool> wanted(11, argc == 1);
    for (int i = 1; i < argc; ++i)
    {
        const int id = std::atoi(argv[i]);
        if (id >= 1 && id <= 10)
        {
            wanted[static_cast<std::size_t>(id)] = true;
        }
    }
    int failures = 0;
    int ran = 0;
    auto report = [&](int id, const char *name, const std::function<Verdict()> &fn) {
        if (!wanted[static_cast<std::size_t>(id)])
        {
            return;
        }
        const Verdict v = guarded(fn);
        std::printf("%s %2d %s: %s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str());
        std::fflush(stdout);
        failures += v.pass ? 0 : 1;
        ++ran;
    };

    report(1, "energy calibration", energy_calibration);
    report(2, "peak throughput calibration", throughput_calibration);
    OracleRuns runs;
    if (wanted[3] || wanted[4])
    {
        runs = oracle_runs();
    }
    report(3, "oracle equivalence", [&] { return oracle_equivalence(runs); });
    report(4, "barrier safety and quiescence", [&] { return barrier_safety(runs); });
    report(5, "NoC delivery", noc_delivery);
    report(6, "determinism across worker counts", determinism);
    report(7, "assignment optimality", hungarian_optimality);
    report(8, "rank correlation correctness", spearman_correctness);
    report(9, "mapping fidelity closure", mapping_fidelity);
    report(10, "adaptive step budget", adaptive_step);
    std::printf("%d of %d criteria failed\n", failures, ran);
    return failures == 0 ? 0 : 1;
}
