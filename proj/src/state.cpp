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

#include "ptomo/state.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ptomo {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

int log2_exact(std::size_t n) {
    if (n == 0 || (n & (n - 1)) != 0) return -1;
    int k = 0;
    while ((std::size_t{1} << k) < n) ++k;
    return k;
}

// Applies the 2x2 matrix [[a, b], [c, d]] to the qubit at index bit `bit`.
void apply_single(std::vector<Amplitude> &amps, int bit, Amplitude a, Amplitude b, Amplitude c, Amplitude d) {
    const std::size_t stride = std::size_t{1} << bit;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & stride) continue;
        Amplitude lo = amps[i];
        Amplitude hi = amps[i | stride];
        amps[i] = a * lo + b * hi;
        amps[i | stride] = c * lo + d * hi;
    }
}

}  // namespace

StateVector StateVector::from_amplitudes(std::vector<Amplitude> amplitudes) {
    int n = log2_exact(amplitudes.size());
    if (n < 0) {
        throw std::invalid_argument("state length " + std::to_string(amplitudes.size()) + " is not a power of two");
    }
    double norm2 = 0.0;
    for (const auto &a : amplitudes) norm2 += std::norm(a);
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
        throw std::invalid_argument("state has zero or non-finite norm");
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto &a : amplitudes) a *= scale;
    return StateVector(n, std::move(amplitudes));
}

StateVector StateVector::basis_state(int num_qubits, std::uint64_t index) {
    if (num_qubits < 0 || num_qubits > 30) throw std::invalid_argument("qubit count out of range");
    std::vector<Amplitude> amps(std::size_t{1} << num_qubits);
    if (index >= amps.size()) throw std::invalid_argument("basis index out of range");
    amps[index] = 1.0;
    return StateVector(num_qubits, std::move(amps));
}

Prefix Prefix::parse(std::string_view text) {
    Prefix p;
    for (char c : text) {
        if (c != '0' && c != '1') throw std::invalid_argument("prefix must be a 0/1 string");
        p = p.child(c - '0');
    }
    return p;
}

std::string Prefix::str() const {
    std::string s(static_cast<std::size_t>(length), '0');
    for (int i = 0; i < length; ++i) {
        if ((value >> (length - 1 - i)) & 1) s[static_cast<std::size_t>(i)] = '1';
    }
    return s;
}

Amplitude inner_product(const StateVector &bra, const StateVector &ket) {
    if (bra.dim() != ket.dim()) throw std::invalid_argument("inner product of states with different dimension");
    Amplitude acc{0.0, 0.0};
    for (std::size_t i = 0; i < bra.dim(); ++i) acc += std::conj(bra[i]) * ket[i];
    return acc;
}

StateVector tensor_with_basis_bit(int bit, const StateVector &state) {
    std::vector<Amplitude> amps(2 * state.dim());
    std::copy(state.amplitudes().begin(), state.amplitudes().end(),
              amps.begin() + static_cast<std::ptrdiff_t>(bit ? state.dim() : 0));
    return StateVector::from_amplitudes(std::move(amps));
}

StateVector haar_random_state(int num_qubits, Rng &rng) {
    if (num_qubits < 0 || num_qubits > 30) throw std::invalid_argument("qubit count out of range");
    if (num_qubits == 0) return StateVector();
    std::normal_distribution<double> gauss;
    std::vector<Amplitude> amps(std::size_t{1} << num_qubits);
    for (auto &a : amps) {
        double re = gauss(rng);
        double im = gauss(rng);
        a = Amplitude(re, im);
    }
    return StateVector::from_amplitudes(std::move(amps));
}

NodeDecomposition condition_on_prefix(const StateVector &psi, const Prefix &prefix) {
    if (prefix.length < 0 || prefix.length > psi.num_qubits()) {
        throw std::invalid_argument("prefix longer than the state");
    }
    const int suffix_qubits = psi.num_qubits() - prefix.length;
    const std::size_t block = std::size_t{1} << suffix_qubits;
    const std::size_t offset = static_cast<std::size_t>(prefix.value) * block;
    NodeDecomposition node;
    node.prefix = prefix;
    double weight = 0.0;
    for (std::size_t s = 0; s < block; ++s) weight += std::norm(psi[offset + s]);
    node.weight = weight;
    if (weight >= 1e-300) {
        std::vector<Amplitude> amps(psi.amplitudes().begin() + static_cast<std::ptrdiff_t>(offset),
                                    psi.amplitudes().begin() + static_cast<std::ptrdiff_t>(offset + block));
        node.conditional = StateVector::from_amplitudes(std::move(amps));
    }
    return node;
}

BornSampler::BornSampler(const StateVector &psi, int prefix_length, const MeasurementBasis &suffix_basis)
    : prefix_length_(prefix_length), suffix_length_(suffix_basis.size()) {
    if (prefix_length < 0 || prefix_length + suffix_basis.size() != psi.num_qubits()) {
        throw std::invalid_argument("suffix basis length must equal n - prefix length");
    }
    std::vector<Amplitude> amps(psi.amplitudes().begin(), psi.amplitudes().end());
    const int n = psi.num_qubits();
    const Amplitude h(kInvSqrt2, 0.0);
    for (int q = 0; q < suffix_length_; ++q) {
        const int bit = n - 1 - (prefix_length + q);
        switch (suffix_basis[q]) {
            case Axis::Z: break;
            case Axis::X: apply_single(amps, bit, h, h, h, -h); break;
            case Axis::Y:
                // H * S^dagger maps the +1 eigenvector of Y to |0>.
                apply_single(amps, bit, h, Amplitude(0.0, -kInvSqrt2), h, Amplitude(0.0, kInvSqrt2));
                break;
        }
    }
    probabilities_.resize(amps.size());
    cumulative_.resize(amps.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        probabilities_[i] = std::norm(amps[i]);
        acc += probabilities_[i];
        cumulative_[i] = acc;
    }
}

std::uint64_t BornSampler::draw_index(Rng &rng) const {
    const double u = uniform01(rng) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    // Skip zero-probability entries that share the same cumulative value.
    while (probabilities_[static_cast<std::size_t>(it - cumulative_.begin())] == 0.0 && it != cumulative_.begin()) {
        --it;
    }
    return static_cast<std::uint64_t>(it - cumulative_.begin());
}

MeasurementSample BornSampler::draw(Rng &rng) const {
    const std::uint64_t index = draw_index(rng);
    const std::uint64_t suffix_mask = index & ((std::uint64_t{1} << suffix_length_) - 1);
    return MeasurementSample{Prefix{index >> suffix_length_, prefix_length_},
                             OutcomeBits::from_mask(suffix_mask, suffix_length_)};
}

MeasurementSample sample_measurement(const StateVector &psi, int prefix_length, const MeasurementBasis &suffix_basis,
                                     Rng &rng) {
    return BornSampler(psi, prefix_length, suffix_basis).draw(rng);
}

std::vector<Amplitude> apply_pauli(const PauliLabel &label, std::span<const Amplitude> amplitudes) {
    const int n = label.size();
    if (amplitudes.size() != (std::size_t{1} << n)) throw std::invalid_argument("Pauli label length != qubit count");
    std::uint64_t flip = 0;
    std::uint64_t y_mask = 0;
    std::uint64_t z_mask = 0;
    for (int q = 0; q < n; ++q) {
        const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
        switch (label[q]) {
            case Pauli::I: break;
            case Pauli::X: flip |= bit; break;
            case Pauli::Y:
                flip |= bit;
                y_mask |= bit;
                break;
            case Pauli::Z: z_mask |= bit; break;
        }
    }
    const int y_count = __builtin_popcountll(y_mask);
    // Y|0> = i|1>, Y|1> = -i|0>: overall i^{#Y} times (-1)^{#Y on ones}.
    static const Amplitude kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const Amplitude y_phase = kIPow[y_count & 3];
    std::vector<Amplitude> out(amplitudes.size());
    for (std::uint64_t i = 0; i < amplitudes.size(); ++i) {
        const int minus = __builtin_popcountll(i & (y_mask | z_mask)) & 1;
        Amplitude v = amplitudes[i] * y_phase;
        out[i ^ flip] = minus ? -v : v;
    }
    return out;
}

double exact_pauli_expectation(const StateVector &psi, const PauliLabel &label) {
    if (label.size() != psi.num_qubits()) throw std::invalid_argument("Pauli label length != qubit count");
    auto applied = apply_pauli(label, psi.amplitudes());
    Amplitude acc{0.0, 0.0};
    for (std::size_t i = 0; i < applied.size(); ++i) acc += std::conj(psi[i]) * applied[i];
    return std::clamp(acc.real(), -1.0, 1.0);
}

double exact_fidelity(const StateVector &a, const StateVector &b) {
    return std::clamp(std::norm(inner_product(a, b)), 0.0, 1.0);
}

double exact_frobenius(const StateVector &a, const StateVector &b) {
    return std::sqrt(2.0 * (1.0 - exact_fidelity(a, b)));
}

double infidelity_distance(const StateVector &a, const StateVector &b) {
    return std::sqrt(1.0 - exact_fidelity(a, b));
}

int rademacher_sample(double mean, Rng &rng) {
    if (!(std::abs(mean) <= 1.0)) throw std::invalid_argument("Rademacher mean outside [-1, 1]");
    return uniform01(rng) < 0.5 * (1.0 + mean) ? 1 : -1;
}

std::uint64_t BitBernoulli::threshold(double p) {
    if (p >= 1.0) return kAlways;
    if (!(p > 0.0)) return 0;
    return static_cast<std::uint64_t>(std::ldexp(p, 64));
}

void fill_rademacher(double mean, std::span<std::int8_t> out, Rng &rng) {
    if (!(std::abs(mean) <= 1.0)) throw std::invalid_argument("Rademacher mean outside [-1, 1]");
    const std::uint64_t t = BitBernoulli::threshold(0.5 * (1.0 + mean));
    BitBernoulli bits(rng);
    for (auto &v : out) v = bits.draw(t) ? std::int8_t{1} : std::int8_t{-1};
}

StateVector read_state(std::istream &in) {
    std::vector<Amplitude> amps;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        double re = 0.0;
        double im = 0.0;
        if (!(fields >> re >> im)) {
            throw std::invalid_argument("state file line " + std::to_string(line_no) + ": expected \"real imag\"");
        }
        amps.emplace_back(re, im);
    }
    return StateVector::from_amplitudes(std::move(amps));
}

void write_state(std::ostream &out, const StateVector &state) {
    auto old_precision = out.precision(17);
    for (const auto &a : state.amplitudes()) out << a.real() << ' ' << a.imag() << '\n';
    out.precision(old_precision);
}

StateVector read_state_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open state file " + path);
    return read_state(in);
}

void write_state_file(const std::string &path, const StateVector &state) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write state file " + path);
    write_state(out, state);
}

}  // namespace ptomo
