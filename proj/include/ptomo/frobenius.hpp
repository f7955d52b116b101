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

#ifndef PTOMO_FROBENIUS_HPP
#define PTOMO_FROBENIUS_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ptomo/pauli.hpp"
#include "ptomo/rademacher.hpp"
#include "ptomo/rng.hpp"
#include "ptomo/state.hpp"

// Frobenius-distance estimation between an unknown state rho (accessible only
// through Pauli observable outcomes) and a classically known state sigma.
// With v_P = (Tr(rho P) - Tr(sigma P)) / 2 over uniformly random labels P,
// ||rho - sigma||_F = 2 sqrt(d) sqrt(E_P[v_P^2]), so the distance reduces to
// Rademacher norm estimation at alpha = gamma / (2 sqrt(d)).

namespace ptomo::frobenius {

enum class SigmaSampling {
    kFaithful,         // sigma outcomes are sampled as +-1 with mean Tr(sigma P)
    kVarianceReduced,  // the exact -Tr(sigma P) replaces the sampled sigma outcome
};

struct Settings {
    int median_reps = 0;            // K; 0 selects default_median_reps
    std::int64_t base_samples = 0;  // m0; 0 selects rademacher::default_base_samples(alpha)
};

/// Smallest odd K >= 18 ln(d / (gamma delta)) / (2 (1/2 - 1/3)^2).
int default_median_reps(int qubits, double gamma, double delta);

struct Repetition {
    rademacher::IndexPlan indices;
    std::vector<PauliLabel> labels;    // one per draw, label k = PauliLabel::from_index(k)
    std::vector<std::uint64_t> coins;  // one bit per query; 1 means "use the negated sigma outcome"

    int coin(std::size_t query) const { return static_cast<int>((coins[query >> 6] >> (query & 63)) & 1); }
};

/// Everything fixed before any measurement: labels, repetition counts and coins.
struct FrobeniusPlan {
    int qubits = 0;
    double gamma = 0.0;
    double delta = 0.0;
    double alpha = 0.0;
    int median_reps = 0;
    std::vector<Repetition> reps;

    std::size_t queries_per_rep() const { return reps.empty() ? 0 : reps.front().indices.total_samples; }
    std::size_t total_queries() const { return queries_per_rep() * reps.size(); }
};

FrobeniusPlan make_plan(int qubits, double gamma, double delta, Rng &rng, const Settings &settings = {});

/// Query count make_plan would produce, without drawing anything.
std::int64_t planned_queries(int qubits, double gamma, double delta, const Settings &settings = {});

/// x_rho when coin is 0, otherwise -x_sigma.
inline int combine_samples(int x_rho, int x_sigma, int coin) { return coin == 0 ? x_rho : -x_sigma; }

/// Position of one query inside a plan: repetition, level j, slot t, sample a.
struct QueryRef {
    int rep = 0;
    int level = 0;
    std::int64_t slot = 0;
    std::int64_t sample = 0;

    std::string str() const;
};

/// Locates query `query` (stream position within the repetition) in the plan.
QueryRef locate_query(const FrobeniusPlan &plan, int rep, std::size_t query);

class MissingOutcomeError : public std::runtime_error {
   public:
    explicit MissingOutcomeError(const QueryRef &q)
        : std::runtime_error("no outcome for planned query " + q.str()), query_(q) {}
    const QueryRef &query() const { return query_; }

   private:
    QueryRef query_;
};

/// Device-side answer to Pauli observable queries on fresh copies of rho.
class OutcomeSource {
   public:
    virtual ~OutcomeSource() = default;

    /// Writes one +-1 outcome per element of `out`, each from its own copy.
    /// `first` names the query answered by out[0]; the rest follow in order.
    virtual void measure(const PauliLabel &label, const QueryRef &first, std::span<std::int8_t> out) = 0;
};

/// Measures each copy in the Z-filled lift of the label and evaluates the
/// observable from the simulated basis outcome.
class BornSource : public OutcomeSource {
   public:
    BornSource(StateVector state, Rng rng) : state_(std::move(state)), rng_(std::move(rng)) {}
    void measure(const PauliLabel &label, const QueryRef &first, std::span<std::int8_t> out) override;

   private:
    StateVector state_;
    Rng rng_;
};

/// Draws +-1 outcomes with mean <psi|P|psi> directly. Same outcome
/// distribution as BornSource, far cheaper per copy.
class ExpectationSource : public OutcomeSource {
   public:
    ExpectationSource(StateVector state, Rng rng) : state_(std::move(state)), rng_(std::move(rng)) {}
    void measure(const PauliLabel &label, const QueryRef &first, std::span<std::int8_t> out) override;

   private:
    StateVector state_;
    Rng rng_;
};

struct DistanceEstimate {
    double frobenius = 0.0;             // D = 2 sqrt(d) median(q)
    std::vector<double> rep_estimates;  // q per repetition

    /// D / sqrt(2), the sqrt(1 - F) scale for pure states.
    double infidelity() const;
};

/// Collects rho outcomes repetition by repetition and post-processes them.
DistanceEstimate estimate_distance(const FrobeniusPlan &plan, OutcomeSource &rho, const StateVector &sigma, Rng &rng,
                                   SigmaSampling mode = SigmaSampling::kFaithful);

/// Post-processing over recorded rho outcomes laid out repetition-major in
/// query order. A zero entry marks a missing outcome.
DistanceEstimate estimate_from_outcomes(const FrobeniusPlan &plan, std::span<const std::int8_t> rho,
                                        const StateVector &sigma, Rng &rng,
                                        SigmaSampling mode = SigmaSampling::kFaithful);

/// Single repetition: q from rho outcomes and sigma expectations (one per draw).
/// `rep_index` only labels MissingOutcomeError.
rademacher::Estimate estimate_repetition(const Repetition &rep, std::span<const std::int8_t> rho,
                                         std::span<const double> sigma_expectations, Rng &rng, SigmaSampling mode,
                                         int rep_index = 0);

/// Precomputed rho-side window sums for scoring many sigma candidates against
/// one fixed outcome record. Sigma outcomes only enter through counts of
/// coin-1 queries per window, so each window's sigma contribution is a single
/// binomial draw.
class OutcomeDigest {
   public:
    OutcomeDigest(const FrobeniusPlan &plan, std::span<const std::int8_t> rho);

    /// `sigma_expectations` holds Tr(sigma P) per (rep, draw), repetition-major.
    DistanceEstimate estimate(std::span<const double> sigma_expectations, Rng &rng, SigmaSampling mode) const;

    std::size_t expectation_count() const { return expectation_count_; }

   private:
    struct Segment {
        double rho_sum;
        std::int64_t sigma_count;
    };
    const FrobeniusPlan *plan_;
    std::size_t expectation_count_ = 0;
    // Per (rep, draw): 3 + level segments: two quarters then Level-Check increments.
    std::vector<std::size_t> segment_offsets_;
    std::vector<Segment> segments_;
};

/// Tr(sigma P) for every planned label, repetition-major.
std::vector<double> sigma_expectations(const FrobeniusPlan &plan, const StateVector &sigma);

/// Plan text: header comments, then per query "rep j t a PAULI coin".
void write_plan(std::ostream &out, const FrobeniusPlan &plan);

}  // namespace ptomo::frobenius

#endif  // PTOMO_FROBENIUS_HPP
