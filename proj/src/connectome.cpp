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

#include "wafersim/connectome.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "wafersim/error.hpp"
#include "wafersim/rng.hpp"

namespace wafersim
{

std::uint64_t Connectome::total_neurons() const noexcept
{
    std::uint64_t total = 0;
    for (const Region &r : regions)
    {
        total += r.neurons;
    }
    return total;
}

std::vector<std::string> Connectome::check() const
{
    std::vector<std::string> problems;
    if (regions.empty())
    {
        problems.emplace_back("connectome has no regions");
    }
    if (weights.rows != regions.size() || weights.cols != regions.size())
    {
        problems.push_back("weight matrix is " + std::to_string(weights.rows) + "x" +
                std::to_string(weights.cols) + " but there are " +
                std::to_string(regions.size()) + " regions");
    }
    for (const Region &r : regions)
    {
        if (r.neurons == 0)
        {
            problems.push_back("region '" + r.name + "' has zero neurons");
        }
    }
    for (std::size_t i = 0; i < weights.values.size(); ++i)
    {
        const double w = weights.values[i];
        if (!(w >= 0.0) || !std::isfinite(w))
        {
            problems.push_back("weight at row " + std::to_string(i / std::max<std::size_t>(1, weights.cols)) +
                    ", column " + std::to_string(i % std::max<std::size_t>(1, weights.cols)) +
                    " is negative or not finite");
            break;
        }
    }
    return problems;
}

namespace
{

std::vector<std::string> split_line(const std::string &line)
{
    const auto hash = line.find('#');
    std::istringstream in(hash == std::string::npos ? line : line.substr(0, hash));
    std::vector<std::string> tokens;
    std::string token;
    while (in >> token)
    {
        tokens.push_back(token);
    }
    return tokens;
}

template <typename T>
T parse_number(const std::string &token, const std::string &source, std::size_t line,
        const char *field)
{
    T value{};
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
    {
        throw ParseError(source, line,
                std::string("field '") + field + "': invalid number '" + token + "'");
    }
    return value;
}

} // namespace

Connectome parse_connectome(const std::string &text, const std::string &source_name)
{
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    auto next = [&]() -> std::vector<std::string> {
        while (std::getline(in, line))
        {
            ++line_no;
            auto t = split_line(line);
            if (!t.empty())
            {
                return t;
            }
        }
        return {};
    };

    Connectome c;
    auto t = next();
    if (t.size() != 2 || t[0] != "regions")
    {
        throw ParseError(source_name, line_no, "expected 'regions <count>'");
    }
    const auto n = parse_number<std::size_t>(t[1], source_name, line_no, "regions");
    for (std::size_t i = 0; i < n; ++i)
    {
        t = next();
        if (t.size() != 2)
        {
            throw ParseError(source_name, line_no, "expected '<name> <neuron_count>'");
        }
        c.regions.push_back({t[0], parse_number<std::uint64_t>(t[1], source_name, line_no,
                                           "neuron_count")});
    }
    t = next();
    if (t.size() != 2 || t[0] != "synapses")
    {
        throw ParseError(source_name, line_no, "expected 'synapses <total>'");
    }
    c.total_synapses = parse_number<std::uint64_t>(t[1], source_name, line_no, "synapses");
    t = next();
    if (t.size() != 1 || t[0] != "matrix")
    {
        throw ParseError(source_name, line_no, "expected 'matrix'");
    }
    c.weights = Matrix(n, n);
    for (std::size_t r = 0; r < n; ++r)
    {
        t = next();
        if (t.empty())
        {
            throw ParseError(source_name, line_no,
                    "dimension mismatch: matrix has " + std::to_string(r) + " rows, expected " +
                            std::to_string(n));
        }
        if (t.size() != n)
        {
            throw ParseError(source_name, line_no,
                    "dimension mismatch: row " + std::to_string(r) + " has " +
                            std::to_string(t.size()) + " entries, expected " + std::to_string(n));
        }
        for (std::size_t col = 0; col < n; ++col)
        {
            c.weights.at(r, col) = parse_number<double>(t[col], source_name, line_no, "weight");
        }
    }
    if (!next().empty())
    {
        throw ParseError(source_name, line_no,
                "dimension mismatch: matrix has more than " + std::to_string(n) + " rows");
    }
    return c;
}

Connectome ingest_connectome(const std::filesystem::path &path)
{
    Connectome c = parse_connectome(read_text_file(path, "connectome"), path.string());
    if (const auto problems = c.check(); !problems.empty())
    {
        throw ValidationError(path.string() + ": " + problems.front());
    }
    return c;
}

std::string format_connectome(const Connectome &connectome)
{
    std::ostringstream out;
    out.precision(17);
    out << "regions " << connectome.size() << "\n";
    for (const Region &r : connectome.regions)
    {
        out << r.name << " " << r.neurons << "\n";
    }
    out << "synapses " << connectome.total_synapses << "\nmatrix\n";
    for (std::size_t r = 0; r < connectome.weights.rows; ++r)
    {
        for (std::size_t col = 0; col < connectome.weights.cols; ++col)
        {
            out << (col == 0 ? "" : " ") << connectome.weights.at(r, col);
        }
        out << "\n";
    }
    return out.str();
}

std::vector<std::uint64_t> pair_synapse_counts(const Connectome &connectome)
{
    const double sum = std::accumulate(
            connectome.weights.values.begin(), connectome.weights.values.end(), 0.0);
    if (!(sum > 0.0))
    {
        throw ValidationError("connectome weight matrix sums to zero");
    }
    std::vector<std::uint64_t> counts(connectome.weights.values.size());
    const auto total = static_cast<double>(connectome.total_synapses);
    for (std::size_t i = 0; i < counts.size(); ++i)
    {
        counts[i] = static_cast<std::uint64_t>(
                std::llround(total * connectome.weights.values[i] / sum));
    }
    return counts;
}

Network synthesize_network(
        const Connectome &connectome, std::uint64_t seed, const SynthesisParams &params)
{
    if (const auto problems = connectome.check(); !problems.empty())
    {
        throw ValidationError("invalid connectome: " + problems.front());
    }
    if (connectome.total_synapses == 0)
    {
        throw ValidationError("connectome requests zero synapses");
    }
    if (connectome.total_neurons() > std::numeric_limits<std::uint32_t>::max())
    {
        throw ValidationError("connectome has more neurons than a network can index");
    }
    if (params.weight_min > params.weight_max)
    {
        throw ValidationError("synthesis weight range is empty");
    }
    const std::vector<std::uint64_t> counts = pair_synapse_counts(connectome);

    NetworkBuilder builder(params.neuron);
    std::vector<std::uint32_t> first(connectome.size());
    for (std::size_t r = 0; r < connectome.size(); ++r)
    {
        const auto count = static_cast<std::uint32_t>(connectome.regions[r].neurons);
        first[r] = builder.add_neurons(count);
        builder.add_region(connectome.regions[r].name, first[r], first[r] + count);
    }
    builder.reserve_synapses(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));

    Rng rng(seed);
    const std::size_t n = connectome.size();
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = 0; j < n; ++j)
        {
            const std::uint64_t k = counts[i * n + j];
            for (std::uint64_t s = 0; s < k; ++s)
            {
                const auto src = first[i] +
                        static_cast<std::uint32_t>(rng.below(connectome.regions[i].neurons));
                const auto dst = first[j] +
                        static_cast<std::uint32_t>(rng.below(connectome.regions[j].neurons));
                const auto w = static_cast<Weight>(rng.between(params.weight_min, params.weight_max));
                builder.add_synapse(src, dst, w);
            }
        }
    }
    return builder.build();
}

} // namespace wafersim
