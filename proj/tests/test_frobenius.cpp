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

#include <gtest/gtest.h>

#include <cmath>

#include "dense_oracle.hpp"
#include "ptomo/frobenius.hpp"

using namespace ptomo;
using namespace ptomo::frobenius;

namespace {

DistanceEstimate run(const StateVector &rho, const StateVector &sigma, double gamma, int K, std::uint64_t seed,
                     std::int64_t m0 = 0) {
    Rng plan_rng = make_stream(seed, "plan");
    const auto plan = make_plan(rho.num_qubits(), gamma, 0.1, plan_rng, Settings{K, m0});
    ExpectationSource source(rho, make_stream(seed, "rho"));
    Rng sigma_rng = make_stream(seed, "sigma");
    return estimate_distance(plan, source, sigma, sigma_rng);
}

}  // namespace

TEST(PauliIdentity, FrobeniusFromPauliExpectations) {
    Rng rng(1);
    for (int n = 1; n <= 3; ++n) {
        const std::uint64_t N = std::uint64_t{1} << (2 * n);
        const double d = std::ldexp(1.0, n);
        for (int t = 0; t < 10; ++t) {
            const auto a = haar_random_state(n, rng);
            const auto b = haar_random_state(n, rng);
            double acc = 0.0;
            for (std::uint64_t k = 0; k < N; ++k) {
                const auto p = PauliLabel::from_index(k, n);
                const double v = (ptomo::testing::dense_expectation(a, p) - ptomo::testing::dense_expectation(b, p)) / 2;
                acc += v * v;
            }
            EXPECT_NEAR(2 * std::sqrt(d) * std::sqrt(acc / N), ptomo::testing::dense_frobenius(a, b), 1e-9);
        }
    }
}

TEST(DefaultMedianReps, OddAndLargeEnough) {
    const int k = default_median_reps(3, 0.25, 0.1);
    EXPECT_EQ(k % 2, 1);
    const double bound = 18.0 * std::log(8.0 / (0.25 * 0.1)) / (2.0 / 36.0);
    EXPECT_GE(k, bound);
    EXPECT_LT(k, bound + 2);
}

TEST(MakePlan, AlphaAndShape) {
    Rng rng(1);
    const auto plan = make_plan(3, 0.25, 0.1, rng, Settings{5, 16});
    EXPECT_NEAR(plan.alpha, 0.25 / (2 * std::sqrt(8.0)), 1e-12);
    EXPECT_EQ(plan.median_reps, 5);
    ASSERT_EQ(plan.reps.size(), 5u);
    for (const auto &rep : plan.reps) {
        ASSERT_EQ(rep.labels.size(), rep.indices.draws.size());
        for (std::size_t i = 0; i < rep.labels.size(); ++i) {
            EXPECT_EQ(rep.labels[i].index(), rep.indices.draws[i].index);
            EXPECT_EQ(rep.labels[i].size(), 3);
        }
        EXPECT_GE(rep.coins.size() * 64, rep.indices.total_samples);
    }
    EXPECT_EQ(static_cast<std::int64_t>(plan.total_queries()), planned_queries(3, 0.25, 0.1, Settings{5, 16}));
    EXPECT_THROW(make_plan(3, 0.25, 0.1, rng, Settings{4, 16}), std::invalid_argument);
}

TEST(MakePlan, ZeroQubits) {
    Rng rng(2);
    const auto plan = make_plan(0, 0.25, 0.1, rng, Settings{3, 16});
    for (const auto &rep : plan.reps) {
        for (const auto &l : rep.labels) EXPECT_EQ(l.size(), 0);
    }
    const StateVector scalar;
    ExpectationSource src(scalar, Rng(3));
    Rng sr(4);
    EXPECT_LE(estimate_distance(plan, src, scalar, sr).frobenius, 0.25);
}

TEST(MakePlan, DeterministicIncludingCoins) {
    Rng a(7), b(7);
    const auto p = make_plan(2, 0.3, 0.1, a, Settings{3, 16});
    const auto q = make_plan(2, 0.3, 0.1, b, Settings{3, 16});
    for (std::size_t r = 0; r < p.reps.size(); ++r) {
        EXPECT_EQ(p.reps[r].coins, q.reps[r].coins);
        EXPECT_EQ(p.reps[r].labels, q.reps[r].labels);
    }
}

TEST(CombineSamples, Branches) {
    EXPECT_EQ(combine_samples(1, -1, 0), 1);
    EXPECT_EQ(combine_samples(-1, -1, 0), -1);
    EXPECT_EQ(combine_samples(1, -1, 1), 1);
    EXPECT_EQ(combine_samples(1, 1, 1), -1);
}

TEST(CombineSamples, MeanIsHalfTheDifference) {
    Rng rng(3);
    const auto check = [&](double er, double es, double expect) {
        double s = 0.0;
        const int draws = 100000;
        for (int i = 0; i < draws; ++i) {
            const int coin = static_cast<int>(rng() & 1);
            s += combine_samples(rademacher_sample(er, rng), rademacher_sample(es, rng), coin);
        }
        EXPECT_NEAR(s / draws, expect, 5.0 / std::sqrt(draws));
    };
    check(0.4, 0.4, 0.0);
    check(1.0, -1.0, 1.0);  // rho = |0>, sigma = |1>, P = Z
    check(0.2, -0.6, 0.4);
}

TEST(EstimateDistance, IdenticalStates) {
    Rng rng(4);
    int ok = 0;
    for (int t = 0; t < 20; ++t) {
        const auto psi = haar_random_state(2, rng);
        ok += run(psi, psi, 0.25, 15, 100 + t).frobenius <= 0.25;
    }
    EXPECT_GE(ok, 18);
}

TEST(EstimateDistance, OrthogonalQubits) {
    const auto zero = StateVector::basis_state(1, 0);
    const auto one = StateVector::basis_state(1, 1);
    int ok = 0;
    for (int t = 0; t < 20; ++t) ok += std::abs(run(zero, one, 0.25, 15, 200 + t).frobenius - std::sqrt(2.0)) <= 0.25;
    EXPECT_GE(ok, 18);
}

TEST(EstimateDistance, BornSourceAgreesWithExpectationSource) {
    // Both sources answer with the same outcome law, so they agree in distribution.
    Rng rng(5);
    const auto a = haar_random_state(2, rng);
    const auto b = haar_random_state(2, rng);
    const double exact = exact_frobenius(a, b);
    int ok = 0;
    for (int t = 0; t < 10; ++t) {
        Rng plan_rng = make_stream(t, "plan");
        const auto plan = make_plan(2, 0.3, 0.1, plan_rng, Settings{7, 0});
        BornSource src(a, make_stream(t, "rho"));
        Rng sr = make_stream(t, "sigma");
        ok += std::abs(estimate_distance(plan, src, b, sr).frobenius - exact) <= 0.3;
    }
    EXPECT_GE(ok, 9);
}

TEST(EstimateFromOutcomes, MissingOutcomeNamesQuery) {
    Rng rng(6);
    const auto plan = make_plan(1, 0.5, 0.1, rng, Settings{3, 16});
    std::vector<std::int8_t> rho(plan.total_queries(), 1);
    const std::size_t hole = plan.queries_per_rep() + 5;
    rho[hole] = 0;
    const auto sigma = StateVector::basis_state(1, 0);
    try {
        estimate_from_outcomes(plan, rho, sigma, rng);
        FAIL() << "expected MissingOutcomeError";
    } catch (const MissingOutcomeError &e) {
        const auto want = locate_query(plan, 1, 5);
        EXPECT_EQ(e.query().rep, 1);
        EXPECT_EQ(e.query().level, want.level);
        EXPECT_EQ(e.query().slot, want.slot);
        EXPECT_EQ(e.query().sample, want.sample);
    }
    rho.pop_back();
    EXPECT_THROW(estimate_from_outcomes(plan, rho, sigma, rng), std::invalid_argument);
}

TEST(OutcomeDigest, MatchesDirectEstimateInDistribution) {
    // The digest replaces per-sample sigma draws by one binomial per window;
    // both are unbiased for the same window sums.
    Rng rng(7);
    const auto rho = haar_random_state(2, rng);
    const auto sigma = haar_random_state(2, rng);
    Rng plan_rng(8);
    const auto plan = make_plan(2, 0.4, 0.1, plan_rng, Settings{1, 64});
    std::vector<std::int8_t> outcomes(plan.total_queries());
    ExpectationSource src(rho, Rng(9));
    std::size_t pos = 0;
    for (const auto &rep : plan.reps) {
        for (std::size_t i = 0; i < rep.labels.size(); ++i) {
            const auto m = static_cast<std::size_t>(rep.indices.block_size(rep.indices.draws[i]));
            src.measure(rep.labels[i], QueryRef{}, std::span(outcomes).subspan(pos, m));
            pos += m;
        }
    }
    const OutcomeDigest digest(plan, outcomes);
    const auto sig = sigma_expectations(plan, sigma);
    double mean_fast = 0.0, mean_direct = 0.0;
    const int reps = 400;
    Rng r1(10), r2(11);
    for (int t = 0; t < reps; ++t) {
        mean_fast += digest.estimate(sig, r1, SigmaSampling::kFaithful).rep_estimates[0];
        mean_direct += estimate_from_outcomes(plan, outcomes, sigma, r2).rep_estimates[0];
    }
    EXPECT_NEAR(mean_fast / reps, mean_direct / reps, 0.03);
}

TEST(EstimateDistance, VarianceReducedModeIsAccurate) {
    Rng rng(12);
    int ok = 0;
    for (int t = 0; t < 10; ++t) {
        const auto a = haar_random_state(2, rng);
        const auto b = haar_random_state(2, rng);
        Rng plan_rng = make_stream(t, "plan");
        const auto plan = make_plan(2, 0.3, 0.1, plan_rng, Settings{7, 0});
        ExpectationSource src(a, make_stream(t, "rho"));
        Rng sr = make_stream(t, "sigma");
        ok += std::abs(estimate_distance(plan, src, b, sr, SigmaSampling::kVarianceReduced).frobenius -
                       exact_frobenius(a, b)) <= 0.3;
    }
    EXPECT_GE(ok, 9);
}
