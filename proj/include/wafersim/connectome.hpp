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

// connectome.hpp - region-level connectivity and network synthesis.
//
// Connectome file:
//
//   regions <n>
//   <name> <neuron_count>          n lines
//   synapses <total>
//   matrix
//   <w_0 ... w_{n-1}>              n rows, non-negative
#ifndef WAFERSIM_CONNECTOME_HPP_
#define WAFERSIM_CONNECTOME_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wafersim/network.hpp"

namespace wafersim
{

struct Region
{
    std::string name;
    std::uint64_t neurons{0};

    bool operator==(const Region &) const = default;
};

// Dense row-major matrix.
struct Matrix
{
    std::size_t rows{0};
    std::size_t cols{0};
    std::vector<double> values;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
            : rows(r)
            , cols(c)
            , values(r * c, fill)
    {
    }
    double &at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    [[nodiscard]] double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

    bool operator==(const Matrix &) const = default;
};

struct Connectome
{
    std::vector<Region> regions;
    Matrix weights;
    std::uint64_t total_synapses{0};

    [[nodiscard]] std::size_t size() const noexcept { return regions.size(); }
    [[nodiscard]] std::uint64_t total_neurons() const noexcept;
    // Violations of the connectome invariants; empty when valid.
    [[nodiscard]] std::vector<std::string> check() const;
};

Connectome parse_connectome(const std::string &text,
        const std::string &source_name = "<connectome>");
// Throws ParseError (malformed or non-square) or ValidationError.
Connectome ingest_connectome(const std::filesystem::path &path);
std::string format_connectome(const Connectome &connectome);

// round(total * W[i][j] / sum(W)) for every region pair, row-major.
std::vector<std::uint64_t> pair_synapse_counts(const Connectome &connectome);

struct SynthesisParams
{
    NeuronParams neuron;
    Weight weight_min{1};
    Weight weight_max{8};
};

// Regions become contiguous neuron ranges in file order. Endpoints are
// drawn uniformly inside each region, weights uniformly in
// [weight_min, weight_max]. The result is unplaced.
Network synthesize_network(const Connectome &connectome, std::uint64_t seed,
        const SynthesisParams &params = {});

} // namespace wafersim

#endif
