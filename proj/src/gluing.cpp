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

#include "ptomo/gluing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace ptomo::gluing {

AmplitudePair AmplitudePair::canonical(Amplitude b0, Amplitude b1) {
    const double norm = std::sqrt(std::norm(b0) + std::norm(b1));
    if (!(norm > 0.0)) throw std::invalid_argument("amplitude pair is zero");
    b0 /= norm;
    b1 /= norm;
    const double r0 = std::abs(b0);
    Amplitude phase = r0 > 1e-15 ? std::conj(b0) / r0 : std::conj(b1) / std::abs(b1);
    AmplitudePair p{b0 * phase, b1 * phase};
    p.first = Amplitude(std::max(0.0, p.first.real()), 0.0);
    if (r0 <= 1e-15) p.second = Amplitude(std::abs(b1), 0.0);
    return p;
}

AmplitudePair AmplitudePair::from_angles(double theta, double phi) {
    return canonical(Amplitude(std::cos(theta / 2), 0.0), std::polar(std::sin(theta / 2), phi));
}

std::array<double, 3> AmplitudePair::bloch() const {
    const Amplitude c = std::conj(first) * second;
    return {2.0 * c.real(), 2.0 * c.imag(), std::norm(first) - std::norm(second)};
}

double bloch_distance(const AmplitudePair &a, const AmplitudePair &b) {
    const auto u = a.bloch();
    const auto v = b.bloch();
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += (u[i] - v[i]) * (u[i] - v[i]);
    return std::sqrt(s);
}

OptimalCoefficients optimal_coefficients(const StateVector &target, const StateVector &hat0, const StateVector &hat1,
                                         double w0, double w1) {
    if (target.num_qubits() < 1 || hat0.num_qubits() != target.num_qubits() - 1 ||
        hat1.num_qubits() != target.num_qubits() - 1) {
        throw std::invalid_argument("children must have one qubit fewer than the target");
    }
    if (w0 < 0.0 || w1 < 0.0 || std::abs(w0 + w1 - 1.0) > 1e-9) {
        throw std::invalid_argument("child weights must be nonnegative and sum to 1");
    }
    Amplitude c[2];
    const StateVector *hats[2] = {&hat0, &hat1};
    for (int b = 0; b < 2; ++b) {
        auto node = condition_on_prefix(target, Prefix{static_cast<std::uint64_t>(b), 1});
        c[b] = node.conditional ? inner_product(*node.conditional, *hats[b]) : Amplitude{};
    }
    const double s = w0 * std::norm(c[0]) + w1 * std::norm(c[1]);
    if (s < 1e-300) return OptimalCoefficients{AmplitudePair{}, true};
    const double root = std::sqrt(s);
    return OptimalCoefficients{
        AmplitudePair::canonical(std::sqrt(w0) * std::conj(c[0]) / root, std::sqrt(w1) * std::conj(c[1]) / root),
        false};
}

StateVector candidate_state(const AmplitudePair &beta, const StateVector &hat0, const StateVector &hat1) {
    if (hat0.dim() != hat1.dim()) throw std::invalid_argument("children must have equal dimension");
    const std::size_t half = hat0.dim();
    std::vector<Amplitude> amps(2 * half);
    for (std::size_t i = 0; i < half; ++i) {
        amps[i] = beta.first * hat0[i];
        amps[half + i] = beta.second * hat1[i];
    }
    return StateVector::from_amplitudes(std::move(amps));
}

BlochNet::BlochNet(double resolution) : resolution_(resolution) {
    if (!(resolution > 0.0)) throw std::invalid_argument("net resolution must be positive");
    const double pi = std::numbers::pi;
    if (resolution >= 2.0) {
        points_.push_back(Point{0.0, 0.0, AmplitudePair::from_angles(0.0, 0.0)});
        points_.push_back(Point{pi, 0.0, AmplitudePair::from_angles(pi, 0.0)});
        return;
    }
    const int rings = static_cast<int>(std::ceil(pi / resolution));
    for (int i = 0; i <= rings; ++i) {
        const double theta = pi * i / rings;
        const double circumference = 2.0 * pi * std::sin(theta);
        const int count = (i == 0 || i == rings) ? 1 : std::max(1, static_cast<int>(std::ceil(circumference / resolution)));
        for (int k = 0; k < count; ++k) {
            const double phi = 2.0 * pi * k / count;
            points_.push_back(Point{theta, phi, AmplitudePair::from_angles(theta, phi)});
        }
    }
}

std::pair<std::size_t, double> BlochNet::nearest(const AmplitudePair &beta) const {
    std::size_t best = 0;
    double best_d = bloch_distance(beta, points_[0].pair);
    for (std::size_t i = 1; i < points_.size(); ++i) {
        const double d = bloch_distance(beta, points_[i].pair);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return {best, best_d};
}

double find_coeffs_gamma(double eps_star, double scale) { return scale * std::sqrt(2.0 * eps_star); }

double find_coeffs_delta(double eps_star, double delta) { return 1e-4 * eps_star * eps_star * eps_star * delta; }

frobenius::FrobeniusPlan plan_find_coeffs(int qubits, double eps_star, double delta, Rng &rng,
                                          const frobenius::Settings &settings, double accuracy_scale) {
    if (!(eps_star > 0.0 && eps_star <= 1.0)) throw std::invalid_argument("eps_star must lie in (0, 1]");
    return frobenius::make_plan(qubits, find_coeffs_gamma(eps_star, accuracy_scale),
                                find_coeffs_delta(eps_star, delta), rng, settings);
}

CandidateExpectations::CandidateExpectations(const frobenius::FrobeniusPlan &plan, const StateVector &hat0,
                                             const StateVector &hat1) {
    if (hat0.num_qubits() != hat1.num_qubits() || plan.qubits != hat0.num_qubits() + 1) {
        throw std::invalid_argument("plan qubit count must be one more than the children's");
    }
    const StateVector *hats[2] = {&hat0, &hat1};
    std::unordered_map<std::uint64_t, std::array<Amplitude, 4>> cache;
    for (const auto &rep : plan.reps) {
        for (std::size_t i = 0; i < rep.labels.size(); ++i) {
            const std::uint64_t key = rep.indices.draws[i].index;
            auto it = cache.find(key);
            if (it == cache.end()) {
                const PauliLabel &label = rep.labels[i];
                const auto letters = label.letters();
                const PauliLabel rest(std::vector<Pauli>(letters.begin() + 1, letters.end()));
                // <b|P0|b'> for the leading qubit.
                Amplitude head[2][2] = {{1, 0}, {0, 1}};
                switch (label[0]) {
                    case Pauli::I: break;
                    case Pauli::X: head[0][0] = head[1][1] = 0; head[0][1] = head[1][0] = 1; break;
                    case Pauli::Y:
                        head[0][0] = head[1][1] = 0;
                        head[0][1] = Amplitude(0, -1);
                        head[1][0] = Amplitude(0, 1);
                        break;
                    case Pauli::Z: head[1][1] = -1; break;
                }
                std::array<Amplitude, 4> block{};
                for (int bp = 0; bp < 2; ++bp) {
                    const auto applied = apply_pauli(rest, hats[bp]->amplitudes());
                    for (int b = 0; b < 2; ++b) {
                        Amplitude inner{};
                        for (std::size_t k = 0; k < applied.size(); ++k) inner += std::conj((*hats[b])[k]) * applied[k];
                        block[static_cast<size_t>(2 * b + bp)] = head[b][bp] * inner;
                    }
                }
                it = cache.emplace(key, block).first;
            }
            blocks_.push_back(it->second);
        }
    }
}

void CandidateExpectations::evaluate(const AmplitudePair &beta, std::vector<double> &out) const {
    out.resize(blocks_.size());
    const Amplitude b[2] = {beta.first, beta.second};
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const auto &m = blocks_[i];
        Amplitude acc{};
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 2; ++c) acc += std::conj(b[r]) * b[c] * m[static_cast<size_t>(2 * r + c)];
        }
        out[i] = std::clamp(acc.real(), -1.0, 1.0);
    }
}

FindCoeffsResult find_coeffs(const StateVector &hat0, const StateVector &hat1, const frobenius::FrobeniusPlan &plan,
                             std::span<const std::int8_t> outcomes, double eps_star, std::uint64_t seed,
                             const FindCoeffsOptions &options) {
    const frobenius::OutcomeDigest digest(plan, outcomes);
    const CandidateExpectations expectations(plan, hat0, hat1);
    const BlochNet net(options.net_scale * eps_star);
    FindCoeffsResult result;
    result.net_size = net.size();
    result.distance = std::numeric_limits<double>::infinity();
    std::vector<double> sigma;
    for (std::size_t i = 0; i < net.size(); ++i) {
        expectations.evaluate(net[i].pair, sigma);
        Rng rng = make_stream(seed, "find-coeffs-candidate", i);
        const double d = digest.estimate(sigma, rng, options.sigma_mode).infidelity();
        if (options.keep_table) result.table.push_back(CandidateScore{i, net[i].theta, net[i].phi, d});
        if (d < result.distance) {
            result.distance = d;
            result.net_index = i;
        }
    }
    result.beta = net[result.net_index].pair;
    return result;
}

void write_table_csv(std::ostream &out, const FindCoeffsResult &result) {
    out << "net_index,theta,phi,distance\n";
    auto precision = out.precision(12);
    for (const auto &row : result.table) {
        out << row.net_index << ',' << row.theta << ',' << row.phi << ',' << row.distance << '\n';
    }
    out.precision(precision);
}

}  // namespace ptomo::gluing
