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

#include "wafersim/spearman.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "wafersim/error.hpp"

namespace wafersim
{

namespace
{

struct Ties
{
    std::size_t groups{0};
    std::size_t entries{0};
};

std::vector<double> ranks_with_ties(const std::vector<double> &values, Ties &ties)
{
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
            [&values](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n)
    {
        std::size_t j = i + 1;
        while (j < n && values[order[j]] == values[order[i]])
        {
            ++j;
        }
        // Positions i..j-1 hold one value; ranks are 1-based.
        const double mean = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
        {
            ranks[order[k]] = mean;
        }
        if (j - i > 1)
        {
            ++ties.groups;
            ties.entries += j - i;
        }
        i = j;
    }
    return ranks;
}

std::vector<double> flatten(const Matrix &m, bool exclude_diagonal)
{
    std::vector<double> out;
    out.reserve(m.values.size());
    for (std::size_t r = 0; r < m.rows; ++r)
    {
        for (std::size_t c = 0; c < m.cols; ++c)
        {
            if (exclude_diagonal && r == c)
            {
                continue;
            }
            out.push_back(m.at(r, c));
        }
    }
    return out;
}

} // namespace

std::vector<double> average_ranks(const std::vector<double> &values)
{
    Ties ignored;
    return ranks_with_ties(values, ignored);
}

FidelityScore spearman(const Matrix &a, const Matrix &b, bool exclude_diagonal)
{
    if (a.rows != b.rows || a.cols != b.cols)
    {
        throw ValidationError("spearman: matrices differ in shape (" + std::to_string(a.rows) +
                "x" + std::to_string(a.cols) + " vs " + std::to_string(b.rows) + "x" +
                std::to_string(b.cols) + ")");
    }
    const std::vector<double> xa = flatten(a, exclude_diagonal);
    const std::vector<double> xb = flatten(b, exclude_diagonal);
    for (const double v : xa)
    {
        if (!std::isfinite(v))
        {
            throw ValidationError("spearman: non-finite entry");
        }
    }
    for (const double v : xb)
    {
        if (!std::isfinite(v))
        {
            throw ValidationError("spearman: non-finite entry");
        }
    }
    if (xa.size() < 2)
    {
        throw DegenerateError("spearman: fewer than two entries to compare");
    }
    Ties ta;
    Ties tb;
    const std::vector<double> ra = ranks_with_ties(xa, ta);
    const std::vector<double> rb = ranks_with_ties(xb, tb);

    const double n = static_cast<double>(ra.size());
    // Average ranks always have mean (n + 1) / 2.
    const double mean = (n + 1.0) / 2.0;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i)
    {
        const double da = ra[i] - mean;
        const double db = rb[i] - mean;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0)
    {
        throw DegenerateError("spearman: all compared entries are equal; correlation undefined");
    }
    FidelityScore score;
    score.spearman_r = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
    score.compared = ra.size();
    score.tie_groups_a = ta.groups;
    score.tied_entries_a = ta.entries;
    score.tie_groups_b = tb.groups;
    score.tied_entries_b = tb.entries;
    return score;
}

std::string format_fidelity(const FidelityScore &score)
{
    std::ostringstream out;
    out.precision(6);
    out << std::fixed;
    out << "spearman_r " << score.spearman_r << '\n'
        << "compared " << score.compared << '\n'
        << "ties_a " << score.tie_groups_a << " groups " << score.tied_entries_a << " entries\n"
        << "ties_b " << score.tie_groups_b << " groups " << score.tied_entries_b << " entries\n";
    return out.str();
}

} // namespace wafersim
