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

#include "wafersim/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "wafersim/config.hpp"
#include "wafersim/connectome.hpp"
#include "wafersim/ibplanner.hpp"
#include "wafersim/kernel.hpp"
#include "wafersim/mapper.hpp"
#include "wafersim/metrics.hpp"
#include "wafersim/network.hpp"
#include "wafersim/report.hpp"
#include "wafersim/spearman.hpp"

namespace wafersim
{

int exit_code_for(ErrorCategory category) noexcept
{
    switch (category)
    {
    case ErrorCategory::parse:
    case ErrorCategory::validation:
    case ErrorCategory::degenerate:
        return 3;
    case ErrorCategory::infeasible:
        return 4;
    case ErrorCategory::protocol:
    case ErrorCategory::encoding:
        return 5;
    }
    return 1;
}

std::string sha256_hex(const std::string &bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_MD_CTX *ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
            EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 ||
            EVP_DigestFinal_ex(ctx, digest, &length) != 1)
    {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("sha256 failed");
    }
    EVP_MD_CTX_free(ctx);
    std::ostringstream out;
    for (unsigned int i = 0; i < length; ++i)
    {
        out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return out.str();
}

std::string format_manifest(const RunManifest &manifest)
{
    nlohmann::json j;
    j["subcommand"] = manifest.subcommand;
    nlohmann::json inputs = nlohmann::json::array();
    for (const ManifestInput &in : manifest.inputs)
    {
        inputs.push_back({{"role", in.role}, {"path", in.path.string()}, {"sha256", in.sha256}});
    }
    j["inputs"] = inputs;
    j["input_hash"] = manifest.input_hash;
    j["seed"] = manifest.seed;
    j["version"] = manifest.version;
    j["timestamp"] = manifest.timestamp;
    nlohmann::json outputs = nlohmann::json::array();
    for (const auto &p : manifest.outputs)
    {
        outputs.push_back(p.string());
    }
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

namespace
{

std::string utc_now()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string one_line(std::string text)
{
    for (char &c : text)
    {
        if (c == '\n' || c == '\r')
        {
            c = ' ';
        }
    }
    return text;
}

// Inputs read and outputs written by one invocation.
class Session
{
public:
    explicit Session(std::string subcommand)
    {
        manifest_.subcommand = std::move(subcommand);
    }

    std::string read(const std::string &role, const std::filesystem::path &path)
    {
        std::string text = read_text_file(path, role.c_str());
        record(role, path, text);
        return text;
    }

    WaferConfig config(const std::string &name)
    {
        if (name == "default")
        {
            WaferConfig cfg = default_config();
            record("config", "default", format_config(cfg));
            return cfg;
        }
        const std::string text = read("config", name);
        WaferConfig cfg = parse_config(text, name);
        const auto violations = validate_config(cfg);
        if (!violations.empty())
        {
            std::string msg = name + ": invalid config:";
            for (const auto &v : violations)
            {
                msg += " " + v + ";";
            }
            msg.pop_back();
            throw ValidationError(msg);
        }
        return cfg;
    }

    void seed(std::uint64_t s) { manifest_.seed = s; }

    std::filesystem::path write(const std::filesystem::path &requested, const std::string &text)
    {
        std::filesystem::path path = requested;
        if (const char *dir = std::getenv("WAFERSIM_OUT_DIR");
                dir != nullptr && *dir != '\0' && path.is_relative())
        {
            path = std::filesystem::path(dir) / path;
        }
        if (path.has_parent_path())
        {
            std::error_code ec;
            std::filesystem::create_directories(path.parent_path(), ec);
        }
        write_text_file(path, text);
        manifest_.outputs.push_back(path);
        return path;
    }

    void finish()
    {
        if (manifest_.outputs.empty())
        {
            return;
        }
        manifest_.input_hash = sha256_hex(all_bytes_);
        manifest_.timestamp = utc_now();
        std::filesystem::path path = manifest_.outputs.front();
        path += ".manifest.json";
        write_text_file(path, format_manifest(manifest_));
    }

private:
    void record(const std::string &role, const std::filesystem::path &path, const std::string &text)
    {
        manifest_.inputs.push_back({role, path, sha256_hex(text)});
        all_bytes_ += text;
    }

    RunManifest manifest_;
    std::string all_bytes_;
};

struct ValidateArgs
{
    std::string config{"default"};
    std::string network;
    std::string stimulus;
};

struct SimulateArgs
{
    std::string config{"default"};
    std::string network;
    std::string stimulus;
    std::uint64_t steps{0};
    std::uint64_t seed{0};
    std::string trace;
    std::string report;
    unsigned workers{1};
    bool debug{false};
    std::string steps_log;
    std::string packet_trace;
    double utilization{0.8};
};

struct MapArgs
{
    std::string config{"default"};
    std::string network;
    std::string connectome;
    bool synthesize{false};
    std::string out;
    std::string network_out;
    std::string fidelity;
    std::uint64_t seed{0};
    double utilization{0.8};
    std::size_t refine_passes{16};
    bool keep_diagonal{false};
};

struct PlanArgs
{
    std::string netlist;
    std::string geometry;
    std::string algorithm{"hungarian"};
    std::string out;
    std::string feedback;
};

struct ReportArgs
{
    std::string trace;
    std::string report;
    std::string config{"default"};
    std::string out;
};

int do_validate(const ValidateArgs &a, std::ostream &out)
{
    Session session("validate");
    WaferConfig cfg = default_config();
    if (a.config != "default")
    {
        cfg = parse_config(session.read("config", a.config), a.config);
    }
    const auto violations = validate_config(cfg);
    out << "config " << a.config << ": " << violations.size() << " violations\n";
    for (const auto &v : violations)
    {
        out << "  " << v << '\n';
    }
    std::size_t problems = violations.size();
    if (!a.network.empty())
    {
        const Network net = parse_network(session.read("network", a.network), a.network);
        auto issues = net.check();
        if (net.placement && violations.empty())
        {
            const auto placed = check_placement(net, *net.placement, cfg);
            issues.insert(issues.end(), placed.begin(), placed.end());
        }
        out << "network " << a.network << ": " << net.size() << " neurons, "
            << net.synapse_count() << " synapses, " << issues.size() << " violations\n";
        for (const auto &v : issues)
        {
            out << "  " << v << '\n';
        }
        problems += issues.size();
    }
    if (!a.stimulus.empty())
    {
        const Stimulus stim = parse_stimulus(session.read("stimulus", a.stimulus), a.stimulus);
        out << "stimulus " << a.stimulus << ": " << stim.size() << " entries\n";
    }
    if (problems > 0)
    {
        throw ValidationError(std::to_string(problems) + " violation(s) found");
    }
    return 0;
}

int do_simulate(const SimulateArgs &a, std::ostream &out)
{
    Session session("simulate");
    session.seed(a.seed);
    const WaferConfig cfg = session.config(a.config);
    Network net = parse_network(session.read("network", a.network), a.network);
    Stimulus stimulus;
    if (!a.stimulus.empty())
    {
        stimulus = parse_stimulus(session.read("stimulus", a.stimulus), a.stimulus);
    }
    if (!net.placement)
    {
        MappingOptions options;
        options.utilization = a.utilization;
        net.placement = map_network(net, cfg, options).placement;
    }
    RunOptions options;
    options.workers = a.workers;
    options.debug = a.debug;
    options.record_packets = !a.packet_trace.empty();
    RunResult result = run(cfg, net, stimulus, a.steps, a.seed, options);
    if (result.report.elapsed_cycles > 0)
    {
        result.report = compute_metrics(std::move(result.report), cfg);
    }
    const SimReport &r = result.report;
    if (!a.report.empty())
    {
        session.write(a.report, format_report(r));
    }
    if (!a.trace.empty())
    {
        session.write(a.trace, format_trace(result.trace));
    }
    if (!a.steps_log.empty())
    {
        session.write(a.steps_log, format_step_log(r.step_records));
    }
    if (!a.packet_trace.empty())
    {
        session.write(a.packet_trace, format_packet_trace(result.packets));
    }
    session.finish();
    out << "steps " << r.steps << " sops " << r.total_sops << " spikes " << r.total_spikes
        << " elapsed_cycles " << r.elapsed_cycles << '\n';
    if (a.debug)
    {
        out << "barrier_violations " << r.barrier_violations << " quiescence_violations "
            << r.quiescence_violations << '\n';
        if (r.barrier_violations + r.quiescence_violations > 0)
        {
            throw ProtocolError("debug scan found barrier or quiescence violations");
        }
    }
    return 0;
}

std::string format_region_mapping(const RegionMapping &m, const Connectome &c)
{
    std::ostringstream out;
    out << "# region name begin end neurons synapses x y\n";
    for (const Fragment &f : m.fragments)
    {
        const ChipletCoord at = m.chiplets[f.chiplet];
        out << f.region << ' ' << c.regions[f.region].name << ' ' << f.begin << ' ' << f.end << ' '
            << f.neurons() << ' ' << f.synapses << ' ' << at.x << ' ' << at.y << '\n';
    }
    return out.str();
}

int do_map(const MapArgs &a, std::ostream &out)
{
    if (a.network.empty() == a.connectome.empty())
    {
        throw ValidationError("map needs exactly one of --network or --connectome");
    }
    Session session("map");
    session.seed(a.seed);
    const WaferConfig cfg = session.config(a.config);
    MappingOptions options;
    options.utilization = a.utilization;
    options.refine_passes = a.refine_passes;

    auto summarize = [&out](const RegionMapping &m) {
        out << "chiplets_used " << m.chiplets.size() << '\n'
            << "fragments " << m.fragments.size() << '\n'
            << "cut_before_refinement " << m.cut_before_refinement << '\n'
            << "cut_after_refinement " << m.cut_after_refinement << '\n';
    };

    if (!a.connectome.empty())
    {
        const Connectome conn = parse_connectome(session.read("connectome", a.connectome), a.connectome);
        if (const auto problems = conn.check(); !problems.empty())
        {
            throw ValidationError(a.connectome + ": " + problems.front());
        }
        out << "connectome " << conn.size() << " regions, " << conn.total_neurons() << " neurons, "
            << conn.total_synapses << " synapses\n";
        if (!a.synthesize)
        {
            const RegionMapping m = map_connectome(conn, cfg, options);
            session.write(a.out, format_region_mapping(m, conn));
            summarize(m);
            session.finish();
            return 0;
        }
        Network net = synthesize_network(conn, a.seed);
        NetworkMapping m = map_network(net, cfg, options);
        net.placement = m.placement;
        session.write(a.out, format_placement(*net.placement));
        if (!a.network_out.empty())
        {
            session.write(a.network_out, format_network(net));
        }
        summarize(m.regions);
        const FidelityScore score =
                spearman(conn.weights, reconstruct_connectivity(net), !a.keep_diagonal);
        out << format_fidelity(score);
        if (!a.fidelity.empty())
        {
            session.write(a.fidelity, format_fidelity(score));
        }
        session.finish();
        return 0;
    }

    Network net = parse_network(session.read("network", a.network), a.network);
    NetworkMapping m = map_network(net, cfg, options);
    net.placement = m.placement;
    session.write(a.out, format_placement(*net.placement));
    if (!a.network_out.empty())
    {
        session.write(a.network_out, format_network(net));
    }
    summarize(m.regions);
    out << "inter_chiplet_synapses " << inter_chiplet_synapses(net, *net.placement) << '\n';
    session.finish();
    return 0;
}

int do_plan(const PlanArgs &a, std::ostream &out)
{
    Session session("plan");
    const Geometry geometry = parse_geometry(session.read("geometry", a.geometry), a.geometry);
    const Netlist netlist = parse_netlist(session.read("netlist", a.netlist), a.netlist);
    const auto paths = enumerate_paths(geometry);
    const AssignAlgorithm algorithm =
            a.algorithm == "greedy" ? AssignAlgorithm::greedy : AssignAlgorithm::hungarian;
    const Assignment assignment = assign_nets(netlist, geometry, paths, algorithm);
    session.write(a.out, format_assignment(assignment, netlist, geometry, paths));
    if (!a.feedback.empty())
    {
        session.write(a.feedback,
                format_feedback(estimate_parasitics(assignment, netlist, paths, geometry.wire)));
    }
    session.finish();
    out << "paths " << paths.size() << " nets " << netlist.nets.size() << " total_length_mm "
        << to_mm(assignment.total_length) << '\n';
    const auto violations = check_floorplan(geometry.bumps);
    out << "floorplan violations " << violations.size() << '\n';
    for (const auto &v : violations)
    {
        out << "  " << v.chiplet << ": " << v.message << '\n';
    }
    return 0;
}

int do_report(const ReportArgs &a, std::ostream &out)
{
    Session session("report");
    const WaferConfig cfg = session.config(a.config);
    const SpikeTrace trace = parse_trace(session.read("trace", a.trace), a.trace);
    SimReport report;
    if (!a.report.empty())
    {
        report = parse_report(session.read("report", a.report), a.report);
    }
    const std::string text = render_summary(trace, report, cfg);
    out << text;
    if (!a.out.empty())
    {
        session.write(a.out, text);
        session.finish();
    }
    return 0;
}

} // namespace

int dispatch(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    CLI::App app{"wafersim: wafer-scale neuromorphic simulator and planning toolkit", "wafersim"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);

    ValidateArgs va;
    CLI::App *validate = app.add_subcommand("validate", "Check a config (and optional inputs)");
    validate->add_option("--config", va.config, "Config YAML or 'default'");
    validate->add_option("--network", va.network, "Network file");
    validate->add_option("--stimulus", va.stimulus, "Stimulus file");

    SimulateArgs sa;
    CLI::App *simulate = app.add_subcommand("simulate", "Run a network on the wafer model");
    simulate->add_option("--config", sa.config, "Config YAML or 'default'");
    simulate->add_option("--network", sa.network, "Network file")->required();
    simulate->add_option("--stimulus", sa.stimulus, "Stimulus file");
    simulate->add_option("--steps", sa.steps, "Time steps to run")->required();
    simulate->add_option("--seed", sa.seed, "Seed for router arbitration");
    simulate->add_option("--trace", sa.trace, "Spike trace output");
    simulate->add_option("--report", sa.report, "Report JSON output");
    simulate->add_option("--workers", sa.workers, "Worker threads")->check(CLI::PositiveNumber);
    simulate->add_flag("--debug", sa.debug, "Barrier and quiescence scans");
    simulate->add_option("--steps-log", sa.steps_log, "Per-step budget log output");
    simulate->add_option("--packet-trace", sa.packet_trace, "Per-packet log output");
    simulate->add_option("--utilization", sa.utilization, "Mapping utilization for unplaced networks");

    MapArgs ma;
    CLI::App *map = app.add_subcommand("map", "Place a network or connectome onto chiplets");
    map->add_option("--config", ma.config, "Config YAML or 'default'");
    map->add_option("--network", ma.network, "Network file");
    map->add_option("--connectome", ma.connectome, "Connectome file");
    map->add_flag("--synthesize", ma.synthesize, "Synthesize a concrete network from the connectome");
    map->add_option("--out", ma.out, "Placement output")->required();
    map->add_option("--network-out", ma.network_out, "Placed network output");
    map->add_option("--fidelity", ma.fidelity, "Fidelity report output");
    map->add_option("--seed", ma.seed, "Synthesis seed");
    map->add_option("--utilization", ma.utilization, "Target utilization in (0, 1]");
    map->add_option("--refine-passes", ma.refine_passes, "Refinement passes (0 disables)");
    map->add_flag("--keep-diagonal", ma.keep_diagonal, "Include self-connections in the score");

    PlanArgs pa;
    CLI::App *plan = app.add_subcommand("plan", "Assign interposer nets to bump paths");
    plan->add_option("--netlist", pa.netlist, "Netlist file")->required();
    plan->add_option("--geometry", pa.geometry, "Geometry file")->required();
    plan->add_option("--algorithm", pa.algorithm, "hungarian or greedy")
            ->check(CLI::IsMember({"hungarian", "greedy"}));
    plan->add_option("--out", pa.out, "Assignment output")->required();
    plan->add_option("--feedback", pa.feedback, "Per-pin load feedback output");

    ReportArgs ra;
    CLI::App *report = app.add_subcommand("report", "Summarize simulate outputs");
    report->add_option("--trace", ra.trace, "Spike trace")->required();
    report->add_option("--report", ra.report, "Report JSON");
    report->add_option("--config", ra.config, "Config YAML or 'default'");
    report->add_option("--out", ra.out, "Write the summary here too");

    std::vector<const char *> argv{"wafersim"};
    for (const auto &a : args)
    {
        argv.push_back(a.c_str());
    }
    try
    {
        app.parse(static_cast<int>(argv.size()), argv.data());
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e, out, err);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e, out, err);
    }
    catch (const CLI::CallForVersion &e)
    {
        return app.exit(e, out, err);
    }
    catch (const CLI::ParseError &e)
    {
        err << "error[usage]: " << one_line(e.what()) << '\n';
        return 2;
    }

    try
    {
        if (validate->parsed())
        {
            return do_validate(va, out);
        }
        if (simulate->parsed())
        {
            return do_simulate(sa, out);
        }
        if (map->parsed())
        {
            return do_map(ma, out);
        }
        if (plan->parsed())
        {
            return do_plan(pa, out);
        }
        return do_report(ra, out);
    }
    catch (const Error &e)
    {
        err << "error[" << category_name(e.category()) << "]: " << one_line(e.what()) << '\n';
        return exit_code_for(e.category());
    }
    catch (const std::exception &e)
    {
        err << "error[internal]: " << one_line(e.what()) << '\n';
        return 1;
    }
}

int dispatch(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i)
    {
        args.emplace_back(argv[i]);
    }
    return dispatch(args, out, err);
}

} // namespace wafersim
