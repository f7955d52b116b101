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

#ifndef PTOMO_TOMOGRAPHY_HPP
#define PTOMO_TOMOGRAPHY_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ptomo/frobenius.hpp"
#include "ptomo/gluing.hpp"
#include "ptomo/pauli.hpp"
#include "ptomo/state.hpp"

// Pure-state tomography over the binary tree of conditional states. The plan
// fixes, for every tree level l and accuracy e' on the dyadic grid
// {eps, 2 eps, 4 eps, ..., 1}, the Find-Coeffs queries on the (n - l)-qubit
// suffix and replicates each query R = ceil(C (e'/eps) 2^l n^p) times. Each
// copy is measured with the first l qubits in the computational basis and the
// suffix in the lifted Pauli basis; the prefix outcome routes the suffix
// outcome to node x. Reconstruction glues children into parents bottom-up.

namespace ptomo::tomography {

/// Tunable constants. The full theoretical values make even n = 3 runs cost
/// billions of copies, so simulations use the smaller desk() defaults.
struct Constants {
    double budget = 1.0;    // C
    int poly_exponent = 2;  // R uses n^poly_exponent
    frobenius::Settings frobenius;
    double accuracy_scale = 1.0;  // Find-Coeffs Frobenius accuracy = scale * sqrt(2 e')
    double net_scale = 1.0;       // net resolution = net_scale * e'
    bool rescale_accuracy = false;  // run at internal accuracy 2 eps / n^2
    frobenius::SigmaSampling sigma_mode = frobenius::SigmaSampling::kFaithful;

    /// Desk-scale defaults used by the tests and the `run` command.
    static Constants desk();
    /// Literal schedule: m0 = 2000 ln(1/alpha), K from the median formula, C = 1.
    static Constants paper();
};

/// {eps, 2 eps, 4 eps, ...} below 1, followed by 1.
std::vector<double> accuracy_grid(double eps);

struct PlanGroup {
    int level = 0;
    std::size_t grid_index = 0;
    double eps_prime = 0.0;
    std::int64_t replication = 0;
    frobenius::FrobeniusPlan queries;        // on n - level qubits
    std::vector<MeasurementBasis> bases;     // lifted basis per (rep, draw), repetition-major
    std::vector<std::uint64_t> support_masks;
    std::vector<std::size_t> draw_offsets;   // first (rep, draw) index of each repetition
    std::size_t first_entry = 0;

    std::size_t slot_count() const { return queries.total_queries(); }
    std::size_t entry_count() const { return slot_count() * static_cast<std::size_t>(replication); }
};

struct MeasurementPlan {
    int qubits = 0;
    double eps = 0.0;           // requested accuracy
    double internal_eps = 0.0;  // accuracy the grid and replication use
    double delta = 0.0;
    std::uint64_t seed = 0;
    Constants constants;
    std::vector<double> grid;
    std::vector<PlanGroup> groups;  // level n-1 down to 0; within a level, grid order
    std::size_t total_copies = 0;

    const PlanGroup &group(int level, std::size_t grid_index) const;
    std::size_t group_index(int level, std::size_t grid_index) const;
};

/// Replication count ceil(C (e'/eps) 2^level n^p).
std::int64_t replication(const Constants &c, int qubits, int level, double eps_prime, double eps);

/// The plan is a function of (n, eps, delta, constants, seed) only.
MeasurementPlan build_measurement_set(int qubits, double eps, double delta, const Constants &constants,
                                      std::uint64_t seed);

struct GroupCount {
    int level;
    double eps_prime;
    std::int64_t queries;      // |P_{l,e'}|
    std::int64_t replication;  // R_{l,e'}
    std::int64_t copies;       // queries * replication
};

/// Per-(level, e') copy counts computed without drawing the plan; the sum
/// equals build_measurement_set(...).total_copies.
std::vector<GroupCount> count_measurement_set(int qubits, double eps, double delta, const Constants &constants);
std::int64_t total_copies(std::span<const GroupCount> counts);

struct PlanEntry {
    std::size_t id;
    const PlanGroup *group;
    frobenius::QueryRef slot;
    std::int64_t replicate;
    const PauliLabel *label;
    const MeasurementBasis *basis;
};

/// Visits entries in id order.
void for_each_entry(const MeasurementPlan &plan, const std::function<void(const PlanEntry &)> &visit);

/// One line per copy: "l e' rep j t a r LABEL BASIS" after '#' header lines.
void write_plan(std::ostream &out, const MeasurementPlan &plan);

/// Measurement records and the prefix bins derived from them.
class OutcomeLog {
   public:
    /// `records[id]` packs the measured index of entry id: prefix bits above
    /// the suffix outcome mask.
    OutcomeLog(const MeasurementPlan &plan, std::vector<std::uint32_t> records);

    std::span<const std::uint32_t> records() const { return records_; }
    std::size_t copies() const { return records_.size(); }

    /// First observable value per slot of group `g` among copies whose prefix
    /// is `prefix` (0 where none landed).
    std::span<const std::int8_t> bin(std::size_t g, std::uint64_t prefix) const;

    /// Number of copies of group `g` whose prefix is `prefix`.
    std::size_t hits(std::size_t g, std::uint64_t prefix) const;

   private:
    std::vector<std::uint32_t> records_;
    std::vector<std::size_t> bin_offsets_;
    std::vector<std::size_t> slot_counts_;
    std::vector<std::int8_t> bins_;
    std::vector<std::size_t> hits_;
    std::vector<std::size_t> hit_offsets_;
};

/// Measures one copy of `psi` per plan entry.
OutcomeLog execute_plan(const MeasurementPlan &plan, const StateVector &psi, Rng &rng);

/// "entry prefix bits" per line, prefix as a 0/1 string and bits as +/- per suffix qubit.
void write_log(std::ostream &out, const MeasurementPlan &plan, const OutcomeLog &log);
OutcomeLog read_log(std::istream &in, const MeasurementPlan &plan);

enum class NodeStatus { kOk, kFallback };

struct NodeEstimate {
    Prefix prefix;
    StateVector state;
    NodeStatus status = NodeStatus::kOk;
    double eps_prime = 0.0;  // smallest covered grid value; 0 for fallback
    double distance = 0.0;   // estimated sqrt(1 - F) of the chosen candidate
    std::size_t net_size = 0;
    std::size_t net_index = 0;
};

struct Reconstruction {
    StateVector state;
    std::vector<NodeEstimate> nodes;  // internal nodes, level n-1 first
    std::size_t fallback_count = 0;
};

/// Bottom-up reconstruction. Each node uses the smallest grid value whose
/// queries all have an outcome in the node's bin; nodes with no covered
/// value glue their children with (1/sqrt2, 1/sqrt2) and are marked fallback.
Reconstruction reconstruct(const MeasurementPlan &plan, const OutcomeLog &log, std::uint64_t seed);

const char *to_string(NodeStatus status);

}  // namespace ptomo::tomography

#endif  // PTOMO_TOMOGRAPHY_HPP
