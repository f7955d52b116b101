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

#include "ptomo/frobenius.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_map>

namespace ptomo::frobenius {

namespace {

void check_parameters(int qubits, double gamma, double delta) {
    if (qubits < 0 || qubits > 15) throw std::invalid_argument("qubit count out of range");
    const double limit = 2.0 * std::sqrt(std::ldexp(1.0, qubits));
    if (!(gamma > 0.0 && gamma < limit)) throw std::invalid_argument("gamma must lie in (0, 2 sqrt(d))");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
}

double alpha_for(int qubits, double gamma) { return gamma / (2.0 * std::sqrt(std::ldexp(1.0, qubits))); }

int resolve_reps(int qubits, double gamma, double delta, const Settings &settings) {
    int k = settings.median_reps > 0 ? settings.median_reps : default_median_reps(qubits, gamma, delta);
    if (k % 2 == 0) throw std::invalid_argument("median repetition count must be odd");
    return k;
}

std::int64_t resolve_base(double alpha, const Settings &settings) {
    return settings.base_samples > 0 ? settings.base_samples : rademacher::default_base_samples(alpha);
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Sum of c sigma-side terms -Y with Y = +-1 of mean s.
double sigma_window(std::int64_t c, double s, Rng &rng, SigmaSampling mode) {
    if (c == 0) return 0.0;
    if (mode == SigmaSampling::kVarianceReduced) return -static_cast<double>(c) * s;
    const double p = 0.5 * (1.0 + s);
    std::int64_t plus = 0;
    if (p >= 1.0) {
        plus = c;
    } else if (p > 0.0) {
        plus = std::binomial_distribution<std::int64_t>(c, p)(rng);
    }
    return -static_cast<double>(2 * plus - c);
}

DistanceEstimate finish(const FrobeniusPlan &plan, std::vector<double> q) {
    DistanceEstimate est;
    est.rep_estimates = std::move(q);
    est.frobenius = 2.0 * std::sqrt(std::ldexp(1.0, plan.qubits)) * median(est.rep_estimates);
    return est;
}

}  // namespace

int default_median_reps(int qubits, double gamma, double delta) {
    check_parameters(qubits, gamma, delta);
    const double d = std::ldexp(1.0, qubits);
    const double gap = 0.5 - 1.0 / 3.0;
    const double raw = 18.0 * std::log(d / (gamma * delta)) / (2.0 * gap * gap);
    int k = std::max(1, static_cast<int>(std::ceil(raw)));
    return k % 2 ? k : k + 1;
}

std::string QueryRef::str() const {
    return "(rep=" + std::to_string(rep) + ", j=" + std::to_string(level) + ", t=" + std::to_string(slot) +
           ", a=" + std::to_string(sample) + ")";
}

FrobeniusPlan make_plan(int qubits, double gamma, double delta, Rng &rng, const Settings &settings) {
    check_parameters(qubits, gamma, delta);
    FrobeniusPlan plan;
    plan.qubits = qubits;
    plan.gamma = gamma;
    plan.delta = delta;
    plan.alpha = alpha_for(qubits, gamma);
    plan.median_reps = resolve_reps(qubits, gamma, delta, settings);
    const std::int64_t base = resolve_base(plan.alpha, settings);
    const std::uint64_t labels = std::uint64_t{1} << (2 * qubits);
    plan.reps.reserve(static_cast<size_t>(plan.median_reps));
    for (int k = 0; k < plan.median_reps; ++k) {
        Repetition rep;
        rep.indices = rademacher::choose_indices(plan.alpha, labels, rng, base);
        rep.labels.reserve(rep.indices.draws.size());
        for (const auto &d : rep.indices.draws) rep.labels.push_back(PauliLabel::from_index(d.index, qubits));
        const std::size_t words = (rep.indices.total_samples + 63) / 64;
        rep.coins.resize(words);
        for (auto &w : rep.coins) w = rng();
        if (rep.indices.total_samples % 64) {
            rep.coins.back() &= (std::uint64_t{1} << (rep.indices.total_samples % 64)) - 1;
        }
        plan.reps.push_back(std::move(rep));
    }
    return plan;
}

std::int64_t planned_queries(int qubits, double gamma, double delta, const Settings &settings) {
    check_parameters(qubits, gamma, delta);
    const double alpha = alpha_for(qubits, gamma);
    const auto levels = rademacher::LevelPlan::make(alpha, resolve_base(alpha, settings));
    return levels.total_queries() * resolve_reps(qubits, gamma, delta, settings);
}

QueryRef locate_query(const FrobeniusPlan &plan, int rep, std::size_t query) {
    const auto &draws = plan.reps.at(static_cast<size_t>(rep)).indices.draws;
    auto it = std::upper_bound(draws.begin(), draws.end(), query,
                               [](std::size_t q, const rademacher::IndexDraw &d) { return q < d.offset; });
    const auto &d = *(it - 1);
    return QueryRef{rep, d.level, d.slot, static_cast<std::int64_t>(query - d.offset)};
}

void BornSource::measure(const PauliLabel &label, const QueryRef &, std::span<std::int8_t> out) {
    const BornSampler sampler(state_, 0, lift_to_basis(label));
    const std::uint64_t support = label.support_mask();
    for (auto &v : out) v = static_cast<std::int8_t>(observable_sign(support, sampler.draw_index(rng_)));
}

void ExpectationSource::measure(const PauliLabel &label, const QueryRef &, std::span<std::int8_t> out) {
    fill_rademacher(exact_pauli_expectation(state_, label), out, rng_);
}

double DistanceEstimate::infidelity() const { return frobenius / std::sqrt(2.0); }

std::vector<double> sigma_expectations(const FrobeniusPlan &plan, const StateVector &sigma) {
    if (sigma.num_qubits() != plan.qubits) throw std::invalid_argument("sigma qubit count does not match the plan");
    std::unordered_map<std::uint64_t, double> cache;
    std::vector<double> out;
    for (const auto &rep : plan.reps) {
        for (std::size_t i = 0; i < rep.labels.size(); ++i) {
            const std::uint64_t key = rep.indices.draws[i].index;
            auto it = cache.find(key);
            if (it == cache.end()) it = cache.emplace(key, exact_pauli_expectation(sigma, rep.labels[i])).first;
            out.push_back(it->second);
        }
    }
    return out;
}

rademacher::Estimate estimate_repetition(const Repetition &rep, std::span<const std::int8_t> rho,
                                         std::span<const double> sigma_expectations, Rng &rng, SigmaSampling mode,
                                         int rep_index) {
    const auto &plan = rep.indices;
    if (rho.size() != plan.total_samples) throw std::invalid_argument("rho outcome count does not match the plan");
    if (sigma_expectations.size() != plan.draws.size()) {
        throw std::invalid_argument("sigma expectation count does not match the plan");
    }
    auto missing = [&](std::size_t i, std::size_t a) {
        const auto &d = plan.draws[i];
        return MissingOutcomeError(QueryRef{rep_index, d.level, d.slot, static_cast<std::int64_t>(a)});
    };
    if (mode == SigmaSampling::kFaithful) {
        std::vector<std::int8_t> z(plan.total_samples);
        BitBernoulli bits(rng);
        for (std::size_t i = 0; i < plan.draws.size(); ++i) {
            const auto &d = plan.draws[i];
            const auto m = static_cast<std::size_t>(plan.block_size(d));
            const double s = sigma_expectations[i];
            if (!(std::abs(s) <= 1.0)) throw std::invalid_argument("sigma expectation outside [-1, 1]");
            const std::uint64_t t = BitBernoulli::threshold(0.5 * (1.0 + s));
            for (std::size_t a = 0; a < m; ++a) {
                const std::size_t q = d.offset + a;
                if (rho[q] == 0) throw missing(i, a);
                // Sigma outcomes are drawn only where the coin selects them.
                z[q] = static_cast<std::int8_t>(rep.coin(q) ? combine_samples(0, bits.draw(t) ? 1 : -1, 1) : rho[q]);
            }
        }
        return rademacher::build_estimator<std::int8_t>(plan, z);
    }
    std::vector<float> z(plan.total_samples);
    for (std::size_t i = 0; i < plan.draws.size(); ++i) {
        const auto &d = plan.draws[i];
        const auto m = static_cast<std::size_t>(plan.block_size(d));
        const auto s = static_cast<float>(sigma_expectations[i]);
        for (std::size_t a = 0; a < m; ++a) {
            const std::size_t q = d.offset + a;
            if (rho[q] == 0) throw missing(i, a);
            z[q] = rep.coin(q) ? -s : static_cast<float>(rho[q]);
        }
    }
    return rademacher::build_estimator<float>(plan, z);
}

DistanceEstimate estimate_distance(const FrobeniusPlan &plan, OutcomeSource &rho, const StateVector &sigma, Rng &rng,
                                   SigmaSampling mode) {
    const auto expectations = sigma_expectations(plan, sigma);
    std::vector<double> q;
    std::size_t e = 0;
    for (std::size_t k = 0; k < plan.reps.size(); ++k) {
        const Repetition &rep = plan.reps[k];
        std::vector<std::int8_t> outcomes(rep.indices.total_samples);
        for (std::size_t i = 0; i < rep.indices.draws.size(); ++i) {
            const auto &d = rep.indices.draws[i];
            rho.measure(rep.labels[i], QueryRef{static_cast<int>(k), d.level, d.slot, 0},
                        std::span<std::int8_t>(outcomes).subspan(d.offset, static_cast<size_t>(rep.indices.block_size(d))));
        }
        auto sigma_span = std::span<const double>(expectations).subspan(e, rep.indices.draws.size());
        e += rep.indices.draws.size();
        // Window sums carry everything the estimator reads, so score through a
        // one-repetition digest instead of materializing sigma outcomes.
        FrobeniusPlan single;
        single.qubits = plan.qubits;
        single.gamma = plan.gamma;
        single.delta = plan.delta;
        single.alpha = plan.alpha;
        single.median_reps = 1;
        single.reps.push_back(rep);
        try {
            q.push_back(OutcomeDigest(single, outcomes).estimate(sigma_span, rng, mode).rep_estimates.front());
        } catch (const MissingOutcomeError &err) {
            QueryRef where = err.query();
            where.rep = static_cast<int>(k);
            throw MissingOutcomeError(where);
        }
    }
    return finish(plan, std::move(q));
}

DistanceEstimate estimate_from_outcomes(const FrobeniusPlan &plan, std::span<const std::int8_t> rho,
                                        const StateVector &sigma, Rng &rng, SigmaSampling mode) {
    if (rho.size() != plan.total_queries()) throw std::invalid_argument("rho outcome count does not match the plan");
    const auto expectations = sigma_expectations(plan, sigma);
    std::vector<double> q;
    std::size_t e = 0;
    for (std::size_t k = 0; k < plan.reps.size(); ++k) {
        const Repetition &rep = plan.reps[k];
        auto rho_span = rho.subspan(k * plan.queries_per_rep(), plan.queries_per_rep());
        auto sigma_span = std::span<const double>(expectations).subspan(e, rep.indices.draws.size());
        e += rep.indices.draws.size();
        q.push_back(estimate_repetition(rep, rho_span, sigma_span, rng, mode, static_cast<int>(k)).q_hat);
    }
    return finish(plan, std::move(q));
}

OutcomeDigest::OutcomeDigest(const FrobeniusPlan &plan, std::span<const std::int8_t> rho) : plan_(&plan) {
    if (rho.size() != plan.total_queries()) throw std::invalid_argument("rho outcome count does not match the plan");
    for (std::size_t k = 0; k < plan.reps.size(); ++k) {
        const Repetition &rep = plan.reps[k];
        const auto &ip = rep.indices;
        const std::size_t base = k * plan.queries_per_rep();
        const std::int64_t n0 = ip.levels.check_base();
        for (std::size_t q = 0; q < ip.total_samples; ++q) {
            if (rho[base + q] == 0) throw MissingOutcomeError(locate_query(plan, static_cast<int>(k), q));
        }
        for (const auto &d : ip.draws) {
            segment_offsets_.push_back(segments_.size());
            const std::int64_t m = ip.block_size(d);
            auto add = [&](std::int64_t begin, std::int64_t end) {
                std::int64_t sigma_count = 0;
                std::int64_t rho_sum = 0;
                for (std::int64_t a = begin; a < end; ++a) {
                    const std::size_t q = d.offset + static_cast<std::size_t>(a);
                    const int c = rep.coin(q);
                    sigma_count += c;
                    rho_sum += c ? 0 : rho[base + q];
                }
                segments_.push_back(Segment{static_cast<double>(rho_sum), sigma_count});
            };
            add(0, m / 4);
            add(m / 4, m / 2);
            std::int64_t read = 0;
            for (int b = 0; b <= d.level; ++b) {
                const std::int64_t window = (std::int64_t{1} << (2 * b)) * n0;
                add(m / 2 + read, m / 2 + window);
                read = window;
            }
            ++expectation_count_;
        }
    }
}

DistanceEstimate OutcomeDigest::estimate(std::span<const double> sigma_expectations, Rng &rng,
                                         SigmaSampling mode) const {
    if (sigma_expectations.size() != expectation_count_) {
        throw std::invalid_argument("sigma expectation count does not match the plan");
    }
    std::vector<double> q;
    std::size_t e = 0;
    for (const Repetition &rep : plan_->reps) {
        const auto &ip = rep.indices;
        const std::int64_t n0 = ip.levels.check_base();
        std::vector<double> contributions(ip.draws.size(), 0.0);
        for (std::size_t i = 0; i < ip.draws.size(); ++i, ++e) {
            const auto &d = ip.draws[i];
            const Segment *seg = &segments_[segment_offsets_[e]];
            const double s = sigma_expectations[e];
            // Level-Check first; the quarters are only needed when it fires at j.
            double sum = 0.0;
            int fired = -1;
            for (int b = 0; b <= d.level; ++b) {
                const Segment &w = seg[2 + b];
                sum += w.rho_sum + sigma_window(w.sigma_count, s, rng, mode);
                const double window = std::ldexp(static_cast<double>(n0), 2 * b);
                if (std::ldexp(std::abs(sum), b) > window) {
                    fired = b;
                    break;
                }
            }
            if (fired != d.level) continue;
            const double quarter = static_cast<double>(ip.block_size(d) / 4);
            const double mu1 = (seg[0].rho_sum + sigma_window(seg[0].sigma_count, s, rng, mode)) / quarter;
            const double mu2 = (seg[1].rho_sum + sigma_window(seg[1].sigma_count, s, rng, mode)) / quarter;
            contributions[i] = std::min(mu1 * mu2, rademacher::truncation_cap(d.level));
        }
        q.push_back(rademacher::combine_contributions(ip, contributions).q_hat);
    }
    return finish(*plan_, std::move(q));
}

void write_plan(std::ostream &out, const FrobeniusPlan &plan) {
    out << "# frobenius-plan qubits=" << plan.qubits << " gamma=" << plan.gamma << " delta=" << plan.delta
        << " alpha=" << plan.alpha << " K=" << plan.median_reps << '\n';
    out << "# rep j t a PAULI coin\n";
    for (std::size_t k = 0; k < plan.reps.size(); ++k) {
        const Repetition &rep = plan.reps[k];
        for (std::size_t i = 0; i < rep.labels.size(); ++i) {
            const auto &d = rep.indices.draws[i];
            const std::string label = plan.qubits == 0 ? "-" : rep.labels[i].str();
            for (std::int64_t a = 0; a < rep.indices.block_size(d); ++a) {
                out << k << ' ' << d.level << ' ' << d.slot << ' ' << a << ' ' << label << ' '
                    << rep.coin(d.offset + static_cast<std::size_t>(a)) << '\n';
            }
        }
    }
}

}  // namespace ptomo::frobenius
