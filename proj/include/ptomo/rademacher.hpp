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

#ifndef PTOMO_RADEMACHER_HPP
#define PTOMO_RADEMACHER_HPP

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "ptomo/rng.hpp"

// Norm estimation from nonadaptive Rademacher queries. A hidden vector
// v in [-1,1]^N is probed by querying coordinates; each query returns a +-1
// sample with mean v_k. The estimator returns q ~ sqrt(E_k[v_k^2]).

namespace ptomo::rademacher {

struct Level {
    std::int64_t count;    // T_j: coordinates sampled at this level
    std::int64_t samples;  // m_j: queries per coordinate
};

/// Query schedule for accuracy alpha: J = floor(log2(1/alpha)),
/// T_j = max(1, floor(alpha^-2 / 4^j)), m_j = 4^j m0.
struct LevelPlan {
    double alpha = 0.0;
    int top_level = 0;
    std::int64_t base_samples = 0;
    std::vector<Level> levels;

    static LevelPlan make(double alpha, std::int64_t base_samples);

    /// n0 = m0 / 4, the smallest Level-Check window.
    std::int64_t check_base() const { return base_samples / 4; }
    std::int64_t total_queries() const;
};

/// ceil(2000 ln(1/alpha)) rounded up to a multiple of 4.
std::int64_t default_base_samples(double alpha);

struct IndexDraw {
    int level;
    std::int64_t slot;
    std::uint64_t index;
    std::size_t offset;  // first sample of this block in the concatenated stream
};

/// Output of choose_indices: the level plan and one coordinate per (j, t),
/// ordered by level then slot. Samples for all blocks are laid out back to
/// back in the same order.
struct IndexPlan {
    LevelPlan levels;
    std::uint64_t coordinate_count = 0;
    std::vector<IndexDraw> draws;
    std::size_t total_samples = 0;

    std::int64_t block_size(const IndexDraw &d) const { return levels.levels[static_cast<size_t>(d.level)].samples; }
};

/// Samples k_{j,t} uniformly from [0, N). `base_samples` <= 0 selects the default.
IndexPlan choose_indices(double alpha, std::uint64_t coordinate_count, Rng &rng, std::int64_t base_samples = 0);

/// One coordinate's samples at one level, as produced by the query phase.
struct QueryBlock {
    int level = 0;
    std::int64_t slot = 0;
    std::uint64_t index = 0;
    std::vector<std::int8_t> samples;
};

template <class T>
double window_sum(std::span<const T> samples, std::int64_t begin, std::int64_t count) {
    double s = 0.0;
    for (std::int64_t a = begin; a < begin + count; ++a) s += static_cast<double>(samples[static_cast<size_t>(a)]);
    return s;
}

/// Product of the means of samples [0, m/4) and [m/4, m/2).
template <class T>
double est_v_squared(std::span<const T> samples, std::int64_t block_size) {
    if (block_size <= 0 || block_size % 4 != 0) throw std::invalid_argument("block size must be a positive multiple of 4");
    if (static_cast<std::int64_t>(samples.size()) < block_size) throw std::invalid_argument("block has too few samples");
    const std::int64_t quarter = block_size / 4;
    const double mu1 = window_sum(samples, 0, quarter) / static_cast<double>(quarter);
    const double mu2 = window_sum(samples, quarter, quarter) / static_cast<double>(quarter);
    return mu1 * mu2;
}

/// 1 iff the first b in 0..level whose window [m/2, m/2 + 4^b n0) has
/// |mean| > 2^-b equals `level`; 0 if an earlier b fires or none does.
template <class T>
int level_check(std::span<const T> samples, std::int64_t block_size, int level, std::int64_t check_base) {
    const std::int64_t start = block_size / 2;
    const std::int64_t needed = start + (std::int64_t{1} << (2 * level)) * check_base;
    if (check_base <= 0 || static_cast<std::int64_t>(samples.size()) < needed) {
        throw std::invalid_argument("block has too few samples for Level-Check");
    }
    double sum = 0.0;
    std::int64_t read = 0;
    for (int b = 0; b <= level; ++b) {
        const std::int64_t window = (std::int64_t{1} << (2 * b)) * check_base;
        sum += window_sum(samples, start + read, window - read);
        read = window;
        // |sum / window| > 2^-b, kept exact for integer sums.
        if (std::ldexp(std::abs(sum), b) > static_cast<double>(window)) return b == level ? 1 : 0;
    }
    return 0;
}

inline double truncation_cap(int level) { return 16.0 * std::ldexp(1.0, -2 * level); }

/// Sums of a block over the windows the estimator reads: the two quarters
/// used by est_v_squared and the nested Level-Check windows (check[b] is the
/// sum over [m/2, m/2 + 4^b n0)).
struct BlockWindows {
    double quarter1 = 0.0;
    double quarter2 = 0.0;
    std::vector<double> check;
};

template <class T>
BlockWindows block_windows(std::span<const T> samples, std::int64_t block_size, int level, std::int64_t check_base) {
    BlockWindows w;
    const std::int64_t quarter = block_size / 4;
    w.quarter1 = window_sum(samples, 0, quarter);
    w.quarter2 = window_sum(samples, quarter, quarter);
    w.check.resize(static_cast<size_t>(level) + 1);
    double sum = 0.0;
    std::int64_t read = 0;
    for (int b = 0; b <= level; ++b) {
        const std::int64_t window = (std::int64_t{1} << (2 * b)) * check_base;
        sum += window_sum(samples, block_size / 2 + read, window - read);
        read = window;
        w.check[static_cast<size_t>(b)] = sum;
    }
    return w;
}

/// r_{j,t} = min(U, 16 4^-j) * Z computed from window sums.
double block_contribution(const BlockWindows &w, std::int64_t block_size, int level, std::int64_t check_base);

struct Estimate {
    double q_hat = 0.0;
    std::vector<double> level_means;  // r_j
};

/// Combines per-block contributions (ordered as plan.draws) into q.
Estimate combine_contributions(const IndexPlan &plan, std::span<const double> contributions);

/// Build-Estimator over the concatenated sample stream laid out per plan.
template <class T>
Estimate build_estimator(const IndexPlan &plan, std::span<const T> samples) {
    if (samples.size() != plan.total_samples) throw std::invalid_argument("sample stream does not match the plan");
    const std::int64_t n0 = plan.levels.check_base();
    std::vector<double> contributions(plan.draws.size());
    for (std::size_t i = 0; i < plan.draws.size(); ++i) {
        const IndexDraw &d = plan.draws[i];
        const std::int64_t m = plan.block_size(d);
        auto block = samples.subspan(d.offset, static_cast<size_t>(m));
        const double u = std::min(est_v_squared(block, m), truncation_cap(d.level));
        const int z = level_check(block, m, d.level, n0);
        contributions[i] = u * z;
    }
    return combine_contributions(plan, contributions);
}

/// Build-Estimator over explicit blocks. Throws std::invalid_argument if the
/// blocks do not match the plan's (level, slot, index, m_j) layout.
Estimate build_estimator(const IndexPlan &plan, std::span<const QueryBlock> blocks);

/// sqrt(mean(v_k^2)); the brute-force value the estimator targets.
double oracle_mean_square(std::span<const double> v);

/// Replay format: per block a header line "j t k m_j" followed by one line of
/// space-separated +1/-1 samples.
void write_blocks(std::ostream &out, std::span<const QueryBlock> blocks);
std::vector<QueryBlock> read_blocks(std::istream &in);

/// Splits a concatenated stream into blocks following the plan.
std::vector<QueryBlock> split_blocks(const IndexPlan &plan, std::span<const std::int8_t> samples);

}  // namespace ptomo::rademacher

#endif  // PTOMO_RADEMACHER_HPP
