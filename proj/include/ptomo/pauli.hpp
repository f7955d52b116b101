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

#ifndef PTOMO_PAULI_HPP
#define PTOMO_PAULI_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ptomo/rng.hpp"

namespace ptomo {

/// Single-qubit Pauli letter. The numeric values give the base-4 digit used
/// when labels are converted to and from indices.
enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// Single-qubit measurement axis. Shares numeric values with Pauli.
enum class Axis : std::uint8_t { X = 1, Y = 2, Z = 3 };

char to_char(Pauli p);
char to_char(Axis a);

class BasisMismatchError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// A word over {I,X,Y,Z}. Letter 0 acts on qubit 0, which is the most
/// significant bit of a computational-basis index.
class PauliLabel {
   public:
    PauliLabel() = default;
    explicit PauliLabel(std::vector<Pauli> letters) : letters_(std::move(letters)) {}

    /// Parses "XIZ"-style text. Throws std::invalid_argument on other characters.
    static PauliLabel parse(std::string_view text);

    /// Base-4 decoding of `index` into `num_qubits` letters, letter 0 most significant.
    static PauliLabel from_index(std::uint64_t index, int num_qubits);

    std::uint64_t index() const;
    std::string str() const;

    int size() const { return static_cast<int>(letters_.size()); }
    Pauli operator[](int q) const { return letters_[static_cast<size_t>(q)]; }
    std::span<const Pauli> letters() const { return letters_; }

    std::vector<int> support() const;

    /// Support as a bit mask aligned with computational-basis indices
    /// (qubit q maps to bit size()-1-q).
    std::uint64_t support_mask() const;

    bool operator==(const PauliLabel &) const = default;

   private:
    std::vector<Pauli> letters_;
};

/// Product basis over {X,Y,Z}; every qubit is measured.
class MeasurementBasis {
   public:
    MeasurementBasis() = default;
    explicit MeasurementBasis(std::vector<Axis> axes) : axes_(std::move(axes)) {}

    static MeasurementBasis parse(std::string_view text);

    std::string str() const;
    int size() const { return static_cast<int>(axes_.size()); }
    Axis operator[](int q) const { return axes_[static_cast<size_t>(q)]; }
    std::span<const Axis> axes() const { return axes_; }

    bool operator==(const MeasurementBasis &) const = default;

   private:
    std::vector<Axis> axes_;
};

/// Per-qubit eigenvalue outcomes (+1 / -1) of a product-basis measurement.
class OutcomeBits {
   public:
    OutcomeBits() = default;
    explicit OutcomeBits(std::vector<int> bits);

    /// Decodes a computational-basis index on `num_qubits` qubits: bit value 0
    /// is outcome +1 and bit value 1 is outcome -1.
    static OutcomeBits from_mask(std::uint64_t mask, int num_qubits);
    std::uint64_t mask() const;

    int size() const { return static_cast<int>(bits_.size()); }
    int operator[](int q) const { return bits_[static_cast<size_t>(q)]; }
    std::span<const int> bits() const { return bits_; }

    bool operator==(const OutcomeBits &) const = default;

   private:
    std::vector<int> bits_;
};

enum class FillRule { kZ, kRandom };

/// Basis agreeing with `label` on its support; identity positions get Z.
MeasurementBasis lift_to_basis(const PauliLabel &label);

/// Basis agreeing with `label` on its support; identity positions get an axis
/// drawn uniformly from {X,Y,Z}.
MeasurementBasis lift_to_basis(const PauliLabel &label, Rng &rng);

/// Observable value of `label` given a basis measurement: the product of the
/// outcome bits over the support, +1 for an all-identity label.
int evaluate_observable(const PauliLabel &label, const MeasurementBasis &basis, const OutcomeBits &out);

/// Same as evaluate_observable on packed data: parity of the outcome mask
/// restricted to the support mask.
inline int observable_sign(std::uint64_t support_mask, std::uint64_t outcome_mask) {
    return (__builtin_popcountll(support_mask & outcome_mask) & 1) ? -1 : 1;
}

PauliLabel random_pauli_label(int num_qubits, Rng &rng);

}  // namespace ptomo

#endif  // PTOMO_PAULI_HPP
