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

#include "ptomo/pauli.hpp"

namespace ptomo {

char to_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }
char to_char(Axis a) { return "IXYZ"[static_cast<int>(a)]; }

PauliLabel PauliLabel::parse(std::string_view text) {
    std::vector<Pauli> letters;
    letters.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case 'I': letters.push_back(Pauli::I); break;
            case 'X': letters.push_back(Pauli::X); break;
            case 'Y': letters.push_back(Pauli::Y); break;
            case 'Z': letters.push_back(Pauli::Z); break;
            default:
                throw std::invalid_argument("invalid Pauli letter '" + std::string(1, c) + "' in \"" +
                                            std::string(text) + "\"");
        }
    }
    return PauliLabel(std::move(letters));
}

PauliLabel PauliLabel::from_index(std::uint64_t index, int num_qubits) {
    if (num_qubits < 0 || num_qubits > 31) {
        throw std::invalid_argument("Pauli label length out of range");
    }
    std::vector<Pauli> letters(static_cast<size_t>(num_qubits));
    for (int q = num_qubits - 1; q >= 0; --q) {
        letters[static_cast<size_t>(q)] = static_cast<Pauli>(index & 3);
        index >>= 2;
    }
    if (index != 0) {
        throw std::invalid_argument("Pauli index exceeds 4^m");
    }
    return PauliLabel(std::move(letters));
}

std::uint64_t PauliLabel::index() const {
    std::uint64_t k = 0;
    for (Pauli p : letters_) {
        k = (k << 2) | static_cast<std::uint64_t>(p);
    }
    return k;
}

std::string PauliLabel::str() const {
    std::string s;
    s.reserve(letters_.size());
    for (Pauli p : letters_) s.push_back(to_char(p));
    return s;
}

std::vector<int> PauliLabel::support() const {
    std::vector<int> out;
    for (int q = 0; q < size(); ++q) {
        if (letters_[static_cast<size_t>(q)] != Pauli::I) out.push_back(q);
    }
    return out;
}

std::uint64_t PauliLabel::support_mask() const {
    std::uint64_t mask = 0;
    const int m = size();
    for (int q = 0; q < m; ++q) {
        if (letters_[static_cast<size_t>(q)] != Pauli::I) mask |= std::uint64_t{1} << (m - 1 - q);
    }
    return mask;
}

MeasurementBasis MeasurementBasis::parse(std::string_view text) {
    std::vector<Axis> axes;
    axes.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case 'X': axes.push_back(Axis::X); break;
            case 'Y': axes.push_back(Axis::Y); break;
            case 'Z': axes.push_back(Axis::Z); break;
            default:
                throw std::invalid_argument("invalid basis axis '" + std::string(1, c) + "' in \"" +
                                            std::string(text) + "\"");
        }
    }
    return MeasurementBasis(std::move(axes));
}

std::string MeasurementBasis::str() const {
    std::string s;
    s.reserve(axes_.size());
    for (Axis a : axes_) s.push_back(to_char(a));
    return s;
}

OutcomeBits::OutcomeBits(std::vector<int> bits) : bits_(std::move(bits)) {
    for (int b : bits_) {
        if (b != 1 && b != -1) throw std::invalid_argument("outcome bits must be +1 or -1");
    }
}

OutcomeBits OutcomeBits::from_mask(std::uint64_t mask, int num_qubits) {
    std::vector<int> bits(static_cast<size_t>(num_qubits));
    for (int q = 0; q < num_qubits; ++q) {
        bits[static_cast<size_t>(q)] = ((mask >> (num_qubits - 1 - q)) & 1) ? -1 : 1;
    }
    return OutcomeBits(std::move(bits));
}

std::uint64_t OutcomeBits::mask() const {
    std::uint64_t mask = 0;
    for (int b : bits_) mask = (mask << 1) | (b < 0 ? 1 : 0);
    return mask;
}

MeasurementBasis lift_to_basis(const PauliLabel &label) {
    std::vector<Axis> axes;
    axes.reserve(static_cast<size_t>(label.size()));
    for (Pauli p : label.letters()) {
        axes.push_back(p == Pauli::I ? Axis::Z : static_cast<Axis>(p));
    }
    return MeasurementBasis(std::move(axes));
}

MeasurementBasis lift_to_basis(const PauliLabel &label, Rng &rng) {
    std::uniform_int_distribution<int> pick(1, 3);
    std::vector<Axis> axes;
    axes.reserve(static_cast<size_t>(label.size()));
    for (Pauli p : label.letters()) {
        axes.push_back(p == Pauli::I ? static_cast<Axis>(pick(rng)) : static_cast<Axis>(p));
    }
    return MeasurementBasis(std::move(axes));
}

int evaluate_observable(const PauliLabel &label, const MeasurementBasis &basis, const OutcomeBits &out) {
    if (label.size() != basis.size() || basis.size() != out.size()) {
        throw BasisMismatchError("label, basis and outcome lengths differ");
    }
    int sign = 1;
    for (int q = 0; q < label.size(); ++q) {
        Pauli p = label[q];
        if (p == Pauli::I) continue;
        if (static_cast<Axis>(p) != basis[q]) {
            throw BasisMismatchError("basis " + basis.str() + " does not measure " + label.str() + " at qubit " +
                                     std::to_string(q));
        }
        sign *= out[q];
    }
    return sign;
}

PauliLabel random_pauli_label(int num_qubits, Rng &rng) {
    std::uniform_int_distribution<int> pick(0, 3);
    std::vector<Pauli> letters(static_cast<size_t>(num_qubits));
    for (auto &p : letters) p = static_cast<Pauli>(pick(rng));
    return PauliLabel(std::move(letters));
}

}  // namespace ptomo
