// Copyright 2026 The ptomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ptomo/rademacher.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace ptomo::rademacher {

LevelPlan LevelPlan::make(double alpha, std::int64_t base_samples) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (base_samples <= 0 || base_samples % 4 != 0) {
        throw std::invalid_argument("m0 must be a positive multiple of 4");
    }
    LevelPlan plan;
    plan.alpha = alpha;
    plan.base_samples = base_samples;
    plan.top_level = static_cast<int>(std::floor(std::log2(1.0 / alpha) + 1e-12));
    const double inv_alpha_sq = 1.0 / (alpha * alpha);
    for (int j = 0; j <= plan.top_level; ++j) {
        const double scale = std::ldexp(1.0, 2 * j);
        const auto count = static_cast<std::int64_t>(std::floor(inv_alpha_sq / scale + 1e-9));
        plan.levels.push_back(Level{std::max<std::int64_t>(1, count), base_samples * static_cast<std::int64_t>(scale)});
    }
    return plan;
}

std::int64_t LevelPlan::total_queries() const {
    std::int64_t total = 0;
    for (const Level &l : levels) total += l.count * l.samples;
    return total;
}

std::int64_t default_base_samples(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    auto m0 = static_cast<std::int64_t>(std::ceil(2000.0 * std::log(1.0 / alpha)));
    return std::max<std::int64_t>(4, (m0 + 3) / 4 * 4);
}

IndexPlan choose_indices(double alpha, std::uint64_t coordinate_count, Rng &rng, std::int64_t base_samples) {
    if (coordinate_count == 0) throw std::invalid_argument("coordinate count must be positive");
    IndexPlan plan;
    plan.levels = LevelPlan::make(alpha, base_samples > 0 ? base_samples : default_base_samples(alpha));
    plan.coordinate_count = coordinate_count;
    std::uniform_int_distribution<std::uint64_t> pick(0, coordinate_count - 1);
    std::size_t offset = 0;
    for (int j = 0; j <= plan.levels.top_level; ++j) {
        const Level &level = plan.levels.levels[static_cast<size_t>(j)];
        for (std::int64_t t = 0; t < level.count; ++t) {
            plan.draws.push_back(IndexDraw{j, t, pick(rng), offset});
            offset += static_cast<std::size_t>(level.samples);
        }
    }
    plan.total_samples = offset;
    return plan;
}

double block_contribution(const BlockWindows &w, std::int64_t block_size, int level, std::int64_t check_base) {
    const double quarter = static_cast<double>(block_size / 4);
    int z = 0;
    for (int b = 0; b <= level; ++b) {
        const double window = std::ldexp(static_cast<double>(check_base), 2 * b);
        if (std::ldexp(std::abs(w.check[static_cast<size_t>(b)]), b) > window) {
            z = b == level ? 1 : 0;
            break;
        }
    }
    if (z == 0) return 0.0;
    const double u = (w.quarter1 / quarter) * (w.quarter2 / quarter);
    return std::min(u, truncation_cap(level));
}

Estimate combine_contributions(const IndexPlan &plan, std::span<const double> contributions) {
    if (contributions.size() != plan.draws.size()) throw std::invalid_argument("contribution count != plan draws");
    Estimate est;
    est.level_means.assign(plan.levels.levels.size(), 0.0);
    for (std::size_t i = 0; i < contributions.size(); ++i) {
        est.level_means[static_cast<size_t>(plan.draws[i].level)] += contributions[i];
    }
    double total = 0.0;
    for (std::size_t j = 0; j < est.level_means.size(); ++j) {
        est.level_means[j] /= static_cast<double>(plan.levels.levels[j].count);
        total += est.level_means[j];
    }
    // The level sums can dip below zero; clamp before the square root.
    est.q_hat = std::sqrt(std::max(0.0, total));
    return est;
}

Estimate build_estimator(const IndexPlan &plan, std::span<const QueryBlock> blocks) {
    if (blocks.size() != plan.draws.size()) {
        throw std::invalid_argument("expected " + std::to_string(plan.draws.size()) + " blocks, got " +
                                    std::to_string(blocks.size()));
    }
    std::vector<std::int8_t> stream;
    stream.reserve(plan.total_samples);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const IndexDraw &d = plan.draws[i];
        const QueryBlock &b = blocks[i];
        if (b.level != d.level || b.slot != d.slot || b.index != d.index ||
            static_cast<std::int64_t>(b.samples.size()) != plan.block_size(d)) {
            throw std::invalid_argument("block " + std::to_string(i) + " does not match plan entry (j=" +
                                        std::to_string(d.level) + ", t=" + std::to_string(d.slot) + ")");
        }
        stream.insert(stream.end(), b.samples.begin(), b.samples.end());
    }
    return build_estimator<std::int8_t>(plan, stream);
}

double oracle_mean_square(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("empty vector");
    double acc = 0.0;
    for (double x : v) {
        if (!(std::abs(x) <= 1.0)) throw std::invalid_argument("coordinates must lie in [-1, 1]");
        acc += x * x;
    }
    return std::sqrt(acc / static_cast<double>(v.size()));
}

void write_blocks(std::ostream &out, std::span<const QueryBlock> blocks) {
    for (const QueryBlock &b : blocks) {
        out << b.level << ' ' << b.slot << ' ' << b.index << ' ' << b.samples.size() << '\n';
        for (std::size_t a = 0; a < b.samples.size(); ++a) {
            if (a) out << ' ';
            out << (b.samples[a] > 0 ? "+1" : "-1");
        }
        out << '\n';
    }
}

std::vector<QueryBlock> read_blocks(std::istream &in) {
    std::vector<QueryBlock> blocks;
    std::string header;
    while (std::getline(in, header)) {
        if (header.empty() || header[0] == '#') continue;
        std::istringstream h(header);
        QueryBlock b;
        std::size_t m = 0;
        if (!(h >> b.level >> b.slot >> b.index >> m)) throw std::invalid_argument("bad block header: " + header);
        std::string row;
        if (!std::getline(in, row)) throw std::invalid_argument("missing sample row after header: " + header);
        std::istringstream r(row);
        int v = 0;
        while (r >> v) {
            if (v != 1 && v != -1) throw std::invalid_argument("sample values must be +1 or -1");
            b.samples.push_back(static_cast<std::int8_t>(v));
        }
        if (b.samples.size() != m) throw std::invalid_argument("sample row length does not match header: " + header);
        blocks.push_back(std::move(b));
    }
    return blocks;
}

std::vector<QueryBlock> split_blocks(const IndexPlan &plan, std::span<const std::int8_t> samples) {
    if (samples.size() != plan.total_samples) throw std::invalid_argument("sample stream does not match the plan");
    std::vector<QueryBlock> blocks;
    blocks.reserve(plan.draws.size());
    for (const IndexDraw &d : plan.draws) {
        auto s = samples.subspan(d.offset, static_cast<size_t>(plan.block_size(d)));
        blocks.push_back(QueryBlock{d.level, d.slot, d.index, std::vector<std::int8_t>(s.begin(), s.end())});
    }
    return blocks;
}

}  // namespace ptomo::rademacher
