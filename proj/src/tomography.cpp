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

#include "ptomo/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ptomo::tomography {

Constants Constants::desk() {
    Constants c;
    c.budget = 1.0;
    c.poly_exponent = 2;
    c.frobenius.median_reps = 3;
    c.frobenius.base_samples = 16;
    c.net_scale = 1.0;
    c.accuracy_scale = 0.3;
    return c;
}

Constants Constants::paper() {
    Constants c;
    c.budget = 1.0;
    c.poly_exponent = 2;
    c.frobenius.median_reps = 0;
    c.frobenius.base_samples = 0;
    c.net_scale = 1.0;
    return c;
}

std::vector<double> accuracy_grid(double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
    std::vector<double> grid;
    for (double v = eps; v < 1.0 - 1e-12; v *= 2.0) grid.push_back(v);
    grid.push_back(1.0);
    return grid;
}

std::int64_t replication(const Constants &c, int qubits, int level, double eps_prime, double eps) {
    const double r = c.budget * (eps_prime / eps) * std::ldexp(1.0, level) * std::pow(qubits, c.poly_exponent);
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(r - 1e-9)));
}

namespace {

void check_inputs(int qubits, double eps, double delta, const Constants &constants) {
    if (qubits < 1 || qubits > 12) throw std::invalid_argument("qubit count must lie in [1, 12]");
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    if (!(constants.budget >= 1.0)) throw std::invalid_argument("budget constant C must be >= 1");
    if (constants.poly_exponent < 0) throw std::invalid_argument("poly exponent must be >= 0");
    if (!(constants.net_scale > 0.0)) throw std::invalid_argument("net scale must be positive");
    if (!(constants.accuracy_scale > 0.0 && constants.accuracy_scale <= 1.0)) {
        throw std::invalid_argument("accuracy scale must lie in (0, 1]");
    }
}

double internal_accuracy(int qubits, double eps, const Constants &constants) {
    return constants.rescale_accuracy ? std::min(1.0, 2.0 * eps / (qubits * qubits)) : eps;
}

}  // namespace

const PlanGroup &MeasurementPlan::group(int level, std::size_t grid_index) const {
    return groups.at(group_index(level, grid_index));
}

std::size_t MeasurementPlan::group_index(int level, std::size_t grid_index) const {
    if (level < 0 || level >= qubits || grid_index >= grid.size()) throw std::out_of_range("no such plan group");
    return static_cast<std::size_t>(qubits - 1 - level) * grid.size() + grid_index;
}

MeasurementPlan build_measurement_set(int qubits, double eps, double delta, const Constants &constants,
                                      std::uint64_t seed) {
    check_inputs(qubits, eps, delta, constants);
    MeasurementPlan plan;
    plan.qubits = qubits;
    plan.eps = eps;
    plan.internal_eps = internal_accuracy(qubits, eps, constants);
    plan.delta = delta;
    plan.seed = seed;
    plan.constants = constants;
    plan.grid = accuracy_grid(plan.internal_eps);
    std::size_t entry = 0;
    for (int level = qubits - 1; level >= 0; --level) {
        for (std::size_t gi = 0; gi < plan.grid.size(); ++gi) {
            PlanGroup g;
            g.level = level;
            g.grid_index = gi;
            g.eps_prime = plan.grid[gi];
            g.replication = replication(constants, qubits, level, g.eps_prime, plan.internal_eps);
            Rng rng = make_stream(seed, "plan-group", plan.groups.size());
            g.queries = gluing::plan_find_coeffs(qubits - level, g.eps_prime, delta, rng, constants.frobenius,
                                                 constants.accuracy_scale);
            for (const auto &rep : g.queries.reps) {
                g.draw_offsets.push_back(g.bases.size());
                for (const auto &label : rep.labels) {
                    g.bases.push_back(lift_to_basis(label));
                    g.support_masks.push_back(label.support_mask());
                }
            }
            g.first_entry = entry;
            entry += g.entry_count();
            plan.groups.push_back(std::move(g));
        }
    }
    plan.total_copies = entry;
    return plan;
}

std::vector<GroupCount> count_measurement_set(int qubits, double eps, double delta, const Constants &constants) {
    check_inputs(qubits, eps, delta, constants);
    const double internal = internal_accuracy(qubits, eps, constants);
    std::vector<GroupCount> counts;
    for (int level = qubits - 1; level >= 0; --level) {
        for (double e : accuracy_grid(internal)) {
            const std::int64_t q = frobenius::planned_queries(qubits - level, gluing::find_coeffs_gamma(e, constants.accuracy_scale),
                                                              gluing::find_coeffs_delta(e, delta), constants.frobenius);
            const std::int64_t r = replication(constants, qubits, level, e, internal);
            std::int64_t copies = 0;
            if (__builtin_mul_overflow(q, r, &copies)) throw std::overflow_error("copy count exceeds 64 bits");
            counts.push_back(GroupCount{level, e, q, r, copies});
        }
    }
    return counts;
}

std::int64_t total_copies(std::span<const GroupCount> counts) {
    std::int64_t total = 0;
    for (const auto &c : counts) {
        if (__builtin_add_overflow(total, c.copies, &total)) throw std::overflow_error("copy count exceeds 64 bits");
    }
    return total;
}

void for_each_entry(const MeasurementPlan &plan, const std::function<void(const PlanEntry &)> &visit) {
    std::size_t id = 0;
    for (const PlanGroup &g : plan.groups) {
        for (std::size_t k = 0; k < g.queries.reps.size(); ++k) {
            const auto &rep = g.queries.reps[k];
            for (std::size_t i = 0; i < rep.indices.draws.size(); ++i) {
                const auto &d = rep.indices.draws[i];
                const std::size_t flat = g.draw_offsets[k] + i;
                for (std::int64_t a = 0; a < rep.indices.block_size(d); ++a) {
                    for (std::int64_t r = 0; r < g.replication; ++r) {
                        visit(PlanEntry{id++, &g, frobenius::QueryRef{static_cast<int>(k), d.level, d.slot, a}, r,
                                        &rep.labels[i], &g.bases[flat]});
                    }
                }
            }
        }
    }
}

void write_plan(std::ostream &out, const MeasurementPlan &plan) {
    const auto &c = plan.constants;
    out << "# measurement-plan n=" << plan.qubits << " eps=" << plan.eps << " internal_eps=" << plan.internal_eps
        << " delta=" << plan.delta << " seed=" << plan.seed << '\n';
    out << "# constants C=" << c.budget << " poly=" << c.poly_exponent << " K=" << c.frobenius.median_reps
        << " m0=" << c.frobenius.base_samples << " net_scale=" << c.net_scale << " accuracy_scale=" << c.accuracy_scale
        << " rescale=" << c.rescale_accuracy << '\n';
    out << "# total_copies=" << plan.total_copies << '\n';
    out << "# l eps' rep j t a r label basis\n";
    for_each_entry(plan, [&](const PlanEntry &e) {
        const bool empty = e.label->size() == 0;
        out << e.group->level << ' ' << e.group->eps_prime << ' ' << e.slot.rep << ' ' << e.slot.level << ' '
            << e.slot.slot << ' ' << e.slot.sample << ' ' << e.replicate << ' ' << (empty ? "-" : e.label->str())
            << ' ' << (empty ? "-" : e.basis->str()) << '\n';
    });
}

OutcomeLog::OutcomeLog(const MeasurementPlan &plan, std::vector<std::uint32_t> records)
    : records_(std::move(records)) {
    if (records_.size() != plan.total_copies) throw std::invalid_argument("record count does not match the plan");
    std::size_t bin_total = 0;
    std::size_t hit_total = 0;
    for (const PlanGroup &g : plan.groups) {
        bin_offsets_.push_back(bin_total);
        slot_counts_.push_back(g.slot_count());
        hit_offsets_.push_back(hit_total);
        bin_total += (std::size_t{1} << g.level) * g.slot_count();
        hit_total += std::size_t{1} << g.level;
    }
    bins_.assign(bin_total, 0);
    hits_.assign(hit_total, 0);
    for (std::size_t gi = 0; gi < plan.groups.size(); ++gi) {
        const PlanGroup &g = plan.groups[gi];
        const int suffix = plan.qubits - g.level;
        const std::uint32_t suffix_mask = (std::uint32_t{1} << suffix) - 1;
        const std::size_t slots = g.slot_count();
        std::size_t id = g.first_entry;
        for (std::size_t k = 0; k < g.queries.reps.size(); ++k) {
            const auto &rep = g.queries.reps[k];
            const std::size_t rep_base = k * g.queries.queries_per_rep();
            for (std::size_t i = 0; i < rep.indices.draws.size(); ++i) {
                const auto &d = rep.indices.draws[i];
                const std::uint64_t support = g.support_masks[g.draw_offsets[k] + i];
                for (std::int64_t a = 0; a < rep.indices.block_size(d); ++a) {
                    const std::size_t slot = rep_base + d.offset + static_cast<std::size_t>(a);
                    for (std::int64_t r = 0; r < g.replication; ++r, ++id) {
                        const std::uint32_t rec = records_[id];
                        const std::uint64_t prefix = rec >> suffix;
                        ++hits_[hit_offsets_[gi] + prefix];
                        auto &cell = bins_[bin_offsets_[gi] + prefix * slots + slot];
                        if (cell == 0) cell = static_cast<std::int8_t>(observable_sign(support, rec & suffix_mask));
                    }
                }
            }
        }
    }
}

std::span<const std::int8_t> OutcomeLog::bin(std::size_t g, std::uint64_t prefix) const {
    const std::size_t slots = slot_counts_.at(g);
    return std::span<const std::int8_t>(bins_).subspan(bin_offsets_[g] + prefix * slots, slots);
}

std::size_t OutcomeLog::hits(std::size_t g, std::uint64_t prefix) const { return hits_.at(hit_offsets_.at(g) + prefix); }

OutcomeLog execute_plan(const MeasurementPlan &plan, const StateVector &psi, Rng &rng) {
    if (psi.num_qubits() != plan.qubits) throw std::invalid_argument("state qubit count does not match the plan");
    std::vector<std::uint32_t> records(plan.total_copies);
    std::size_t id = 0;
    for (const PlanGroup &g : plan.groups) {
        for (std::size_t k = 0; k < g.queries.reps.size(); ++k) {
            const auto &rep = g.queries.reps[k];
            for (std::size_t i = 0; i < rep.indices.draws.size(); ++i) {
                const auto &d = rep.indices.draws[i];
                const BornSampler sampler(psi, g.level, g.bases[g.draw_offsets[k] + i]);
                const std::size_t copies = static_cast<std::size_t>(rep.indices.block_size(d) * g.replication);
                for (std::size_t c = 0; c < copies; ++c) records[id++] = static_cast<std::uint32_t>(sampler.draw_index(rng));
            }
        }
    }
    return OutcomeLog(plan, std::move(records));
}

void write_log(std::ostream &out, const MeasurementPlan &plan, const OutcomeLog &log) {
    out << "# outcome-log n=" << plan.qubits << " copies=" << log.copies() << '\n';
    out << "# entry prefix bits\n";
    for_each_entry(plan, [&](const PlanEntry &e) {
        const std::uint32_t rec = log.records()[e.id];
        const int suffix = plan.qubits - e.group->level;
        const Prefix prefix{rec >> suffix, e.group->level};
        std::string bits(static_cast<std::size_t>(suffix), '+');
        for (int q = 0; q < suffix; ++q) {
            if ((rec >> (suffix - 1 - q)) & 1) bits[static_cast<std::size_t>(q)] = '-';
        }
        out << e.id << ' ' << (prefix.length ? prefix.str() : "-") << ' ' << bits << '\n';
    });
}

OutcomeLog read_log(std::istream &in, const MeasurementPlan &plan) {
    std::vector<std::uint32_t> records(plan.total_copies);
    std::vector<bool> seen(plan.total_copies, false);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::size_t id = 0;
        std::string prefix_text;
        std::string bits;
        if (!(fields >> id >> prefix_text >> bits)) throw std::invalid_argument("bad outcome log line: " + line);
        if (id >= records.size()) throw std::invalid_argument("outcome log entry out of range: " + line);
        auto it = std::upper_bound(plan.groups.begin(), plan.groups.end(), id,
                                   [](std::size_t v, const PlanGroup &g) { return v < g.first_entry; });
        const PlanGroup &g = *(it - 1);
        const Prefix prefix = prefix_text == "-" ? Prefix{} : Prefix::parse(prefix_text);
        if (prefix.length != g.level || static_cast<int>(bits.size()) != plan.qubits - g.level) {
            throw std::invalid_argument("outcome log line does not match plan entry: " + line);
        }
        std::uint32_t rec = static_cast<std::uint32_t>(prefix.value);
        for (char b : bits) {
            if (b != '+' && b != '-') throw std::invalid_argument("outcome bits must be '+' or '-': " + line);
            rec = (rec << 1) | (b == '-' ? 1u : 0u);
        }
        records[id] = rec;
        seen[id] = true;
    }
    for (std::size_t id = 0; id < seen.size(); ++id) {
        if (!seen[id]) throw std::invalid_argument("outcome log is missing entry " + std::to_string(id));
    }
    return OutcomeLog(plan, std::move(records));
}

Reconstruction reconstruct(const MeasurementPlan &plan, const OutcomeLog &log, std::uint64_t seed) {
    const int n = plan.qubits;
    gluing::FindCoeffsOptions options;
    options.net_scale = plan.constants.net_scale;
    options.sigma_mode = plan.constants.sigma_mode;
    const auto fallback = gluing::AmplitudePair::canonical(Amplitude(1.0, 0.0), Amplitude(1.0, 0.0));

    Reconstruction result;
    std::vector<StateVector> below(std::size_t{1} << n);  // leaves: 0-qubit states
    for (int level = n - 1; level >= 0; --level) {
        std::vector<StateVector> current;
        current.reserve(std::size_t{1} << level);
        for (std::uint64_t x = 0; x < (std::uint64_t{1} << level); ++x) {
            const StateVector &hat0 = below[2 * x];
            const StateVector &hat1 = below[2 * x + 1];
            NodeEstimate node;
            node.prefix = Prefix{x, level};
            node.status = NodeStatus::kFallback;
            for (std::size_t gi = 0; gi < plan.grid.size(); ++gi) {
                const std::size_t g = plan.group_index(level, gi);
                const auto bin = log.bin(g, x);
                if (std::find(bin.begin(), bin.end(), std::int8_t{0}) != bin.end()) continue;
                const auto found = gluing::find_coeffs(hat0, hat1, plan.groups[g].queries, bin, plan.grid[gi],
                                                       derive_seed(seed, "reconstruct-node", (std::uint64_t{1} << level) + x),
                                                       options);
                node.state = gluing::candidate_state(found.beta, hat0, hat1);
                node.status = NodeStatus::kOk;
                node.eps_prime = plan.grid[gi];
                node.distance = found.distance;
                node.net_size = found.net_size;
                node.net_index = found.net_index;
                break;
            }
            if (node.status == NodeStatus::kFallback) {
                node.state = gluing::candidate_state(fallback, hat0, hat1);
                ++result.fallback_count;
            }
            current.push_back(node.state);
            result.nodes.push_back(std::move(node));
        }
        below = std::move(current);
    }
    result.state = below.front();
    return result;
}

const char *to_string(NodeStatus status) { return status == NodeStatus::kOk ? "ok" : "fallback"; }

}  // namespace ptomo::tomography
