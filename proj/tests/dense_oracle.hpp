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

// Dense-matrix reference implementations used as independent oracles.

#ifndef PTOMO_TESTS_DENSE_ORACLE_HPP
#define PTOMO_TESTS_DENSE_ORACLE_HPP

#include <Eigen/Dense>

#include "ptomo/pauli.hpp"
#include "ptomo/state.hpp"

namespace ptomo::testing {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline Matrix pauli_matrix(Pauli p) {
    const std::complex<double> i{0.0, 1.0};
    Matrix m(2, 2);
    switch (p) {
        case Pauli::I: m << 1, 0, 0, 1; break;
        case Pauli::X: m << 0, 1, 1, 0; break;
        case Pauli::Y: m << 0, -i, i, 0; break;
        case Pauli::Z: m << 1, 0, 0, -1; break;
    }
    return m;
}

inline Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
        }
    }
    return out;
}

// Letter 0 is the leftmost tensor factor, matching qubit 0 as the most
// significant index bit.
inline Matrix dense_pauli(const PauliLabel &label) {
    Matrix m = Matrix::Identity(1, 1);
    for (int q = 0; q < label.size(); ++q) m = kron(m, pauli_matrix(label[q]));
    return m;
}

inline Vector to_vector(const StateVector &s) {
    Vector v(static_cast<Eigen::Index>(s.dim()));
    for (std::size_t i = 0; i < s.dim(); ++i) v(static_cast<Eigen::Index>(i)) = s[i];
    return v;
}

inline Matrix projector(const StateVector &s) {
    const Vector v = to_vector(s);
    return v * v.adjoint();
}

inline double dense_expectation(const StateVector &s, const PauliLabel &label) {
    return (projector(s) * dense_pauli(label)).trace().real();
}

inline double dense_frobenius(const StateVector &a, const StateVector &b) {
    return (projector(a) - projector(b)).norm();
}

inline double dense_fidelity(const StateVector &a, const StateVector &b) {
    return std::norm(to_vector(a).dot(to_vector(b)));
}

}  // namespace ptomo::testing

#endif  // PTOMO_TESTS_DENSE_ORACLE_HPP
