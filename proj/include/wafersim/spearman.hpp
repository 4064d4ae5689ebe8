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

// spearman.hpp - rank correlation between connectivity matrices.
#ifndef WAFERSIM_SPEARMAN_HPP_
#define WAFERSIM_SPEARMAN_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "wafersim/connectome.hpp"

namespace wafersim
{

struct FidelityScore
{
    double spearman_r{0.0};
    std::size_t compared{0};
    // Groups of equal values (size >= 2) and entries inside them.
    std::size_t tie_groups_a{0};
    std::size_t tied_entries_a{0};
    std::size_t tie_groups_b{0};
    std::size_t tied_entries_b{0};
};

// 1-based ranks, tied values share the mean of their positions.
std::vector<double> average_ranks(const std::vector<double> &values);

// Throws ValidationError on mismatched shapes and DegenerateError when
// fewer than two entries are compared or either side has no rank variance.
FidelityScore spearman(const Matrix &a, const Matrix &b, bool exclude_diagonal = true);

std::string format_fidelity(const FidelityScore &score);

} // namespace wafersim

#endif
