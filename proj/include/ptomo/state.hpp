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

#ifndef PTOMO_STATE_HPP
#define PTOMO_STATE_HPP

#include <complex>
#include <cstdint>
#include <algorithm>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ptomo/pauli.hpp"
#include "ptomo/rng.hpp"

namespace ptomo {

using Amplitude = std::complex<double>;

/// Unit-norm pure state on n qubits. Amplitude index bit n-1-q holds qubit q,
/// so qubit 0 is the most significant bit and prefixes are leading bits.
class StateVector {
   public:
    /// The 0-qubit state (the scalar 1).
    StateVector() : num_qubits_(0), amplitudes_{Amplitude{1.0, 0.0}} {}

    /// Normalizes `amplitudes`. Throws std::invalid_argument if the length is
    /// not a power of two or the vector is zero.
    static StateVector from_amplitudes(std::vector<Amplitude> amplitudes);

    static StateVector basis_state(int num_qubits, std::uint64_t index);

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amplitudes_.size(); }
    std::span<const Amplitude> amplitudes() const { return amplitudes_; }
    const Amplitude &operator[](std::size_t i) const { return amplitudes_[i]; }

   private:
    StateVector(int n, std::vector<Amplitude> amps) : num_qubits_(n), amplitudes_(std::move(amps)) {}

    int num_qubits_;
    std::vector<Amplitude> amplitudes_;
};

/// Outcome string of the first `length` qubits, stored as the leading bits of
/// a computational-basis index ("01" has value 1, length 2).
struct Prefix {
    std::uint64_t value = 0;
    int length = 0;

    static Prefix parse(std::string_view text);
    std::string str() const;
    Prefix child(int bit) const { return Prefix{(value << 1) | static_cast<std::uint64_t>(bit), length + 1}; }
    bool operator==(const Prefix &) const = default;
};

struct NodeDecomposition {
    Prefix prefix;
    double weight = 0.0;
    std::optional<StateVector> conditional;
};

struct MeasurementSample {
    Prefix prefix;
    OutcomeBits suffix;
};

Amplitude inner_product(const StateVector &bra, const StateVector &ket);

/// |b> (x) state, i.e. amplitudes placed in the upper or lower half.
StateVector tensor_with_basis_bit(int bit, const StateVector &state);

StateVector haar_random_state(int num_qubits, Rng &rng);

NodeDecomposition condition_on_prefix(const StateVector &psi, const Prefix &prefix);

/// Born-rule sampler for one measurement setting: the first `prefix_length`
/// qubits in the computational basis and the rest in `suffix_basis`. The
/// rotated distribution is computed once and reused across draws.
class BornSampler {
   public:
    BornSampler(const StateVector &psi, int prefix_length, const MeasurementBasis &suffix_basis);

    /// Raw computational-basis index after rotation: the prefix in the
    /// leading bits and the suffix outcome mask in the trailing bits.
    std::uint64_t draw_index(Rng &rng) const;

    MeasurementSample draw(Rng &rng) const;

    std::span<const double> probabilities() const { return probabilities_; }
    int prefix_length() const { return prefix_length_; }
    int suffix_length() const { return suffix_length_; }

   private:
    int prefix_length_;
    int suffix_length_;
    std::vector<double> probabilities_;
    std::vector<double> cumulative_;
};

MeasurementSample sample_measurement(const StateVector &psi, int prefix_length, const MeasurementBasis &suffix_basis,
                                     Rng &rng);

/// <psi|P|psi>, clamped to [-1, 1].
double exact_pauli_expectation(const StateVector &psi, const PauliLabel &label);

/// P|psi>, applied letter by letter.
std::vector<Amplitude> apply_pauli(const PauliLabel &label, std::span<const Amplitude> amplitudes);

double exact_fidelity(const StateVector &a, const StateVector &b);

/// Frobenius norm of the projector difference, sqrt(2 (1 - F)).
double exact_frobenius(const StateVector &a, const StateVector &b);

/// sqrt(1 - F), equal to exact_frobenius / sqrt(2).
double infidelity_distance(const StateVector &a, const StateVector &b);

/// +1 with probability (1 + mean) / 2. Throws std::invalid_argument if |mean| > 1.
int rademacher_sample(double mean, Rng &rng);

void fill_rademacher(double mean, std::span<std::int8_t> out, Rng &rng);

/// Bernoulli draws that read random bits one at a time against the binary
/// expansion of the success probability, stopping at the first difference.
/// Same law as `rng() < threshold` but about two bits per draw.
class BitBernoulli {
   public:
    explicit BitBernoulli(Rng &rng) : rng_(&rng) {}

    /// floor(p 2^64) clamped; p >= 1 maps to "always".
    static std::uint64_t threshold(double p);

    /// True with probability threshold / 2^64 (or always, for the saturated threshold).
    bool draw(std::uint64_t threshold) {
        if (threshold == kAlways) return true;
        int pos = 0;
        for (;;) {
            if (left_ == 0) {
                buf_ = (*rng_)();
                left_ = 64;
            }
            const int avail = std::min(left_, 64 - pos);
            const std::uint64_t t = threshold << pos;
            const std::uint64_t x = buf_ ^ t;
            const int d = x ? __builtin_clzll(x) : 64;
            if (d < avail) {
                consume(d + 1);
                return (t >> (63 - d)) & 1;
            }
            consume(avail);
            pos += avail;
            if (pos == 64) return false;
        }
    }

    static constexpr std::uint64_t kAlways = ~std::uint64_t{0};

   private:
    void consume(int k) {
        buf_ = k >= 64 ? 0 : buf_ << k;
        left_ -= k;
    }

    Rng *rng_;
    std::uint64_t buf_ = 0;
    int left_ = 0;  // valid bits, aligned at the top of buf_
};

/// Text format: one "real imag" pair per line in computational-basis order.
/// Lines starting with '#' are comments.
StateVector read_state(std::istream &in);
void write_state(std::ostream &out, const StateVector &state);
StateVector read_state_file(const std::string &path);
void write_state_file(const std::string &path, const StateVector &state);

}  // namespace ptomo

#endif  // PTOMO_STATE_HPP
