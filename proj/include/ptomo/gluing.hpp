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

#ifndef PTOMO_GLUING_HPP
#define PTOMO_GLUING_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ptomo/frobenius.hpp"
#include "ptomo/state.hpp"

// Gluing two child estimates into a parent estimate
//   |psi_x> ~ b0 |0>|psi_x0> + b1 |1>|psi_x1>
// either with the closed-form optimal coefficients (needs the true state,
// test oracle only) or by net search over (b0, b1) scored with the Frobenius
// estimator on recorded outcomes.

namespace ptomo::gluing {

/// Normalized (b0, b1) with global phase fixed: b0 real and >= 0, and b1 real
/// and >= 0 when b0 is zero.
struct AmplitudePair {
    Amplitude first{1.0, 0.0};
    Amplitude second{0.0, 0.0};

    /// Normalizes and fixes the global phase. Throws on a zero pair.
    static AmplitudePair canonical(Amplitude b0, Amplitude b1);
    static AmplitudePair from_angles(double theta, double phi);

    /// Bloch vector (x, y, z) of the pair as a qubit state.
    std::array<double, 3> bloch() const;
};

/// Euclidean distance between Bloch vectors, in [0, 2].
double bloch_distance(const AmplitudePair &a, const AmplitudePair &b);

struct OptimalCoefficients {
    AmplitudePair pair;
    bool degenerate = false;  // s ~ 0; pair defaults to (1, 0)
};

/// Closed-form best gluing for known `target` = psi_x and child weights
/// w_b = p_xb / p_x: b_b = sqrt(w_b) conj(c_b) / sqrt(s), with
/// c_b = <psi_xb|hat_b> and s = w0 |c0|^2 + w1 |c1|^2. The glued infidelity
/// is then exactly 1 - s = w0 (1 - |c0|^2) + w1 (1 - |c1|^2).
OptimalCoefficients optimal_coefficients(const StateVector &target, const StateVector &hat0, const StateVector &hat1,
                                         double w0, double w1);

/// b0 |0> (x) hat0 + b1 |1> (x) hat1, renormalized.
StateVector candidate_state(const AmplitudePair &beta, const StateVector &hat0, const StateVector &hat1);

/// Latitude-longitude grid on the Bloch sphere with chordal covering radius
/// at most `resolution`. Rings are spaced by at most the resolution in theta
/// and points on each ring by at most the resolution in arc length, so every
/// point is within resolution/2 + resolution/2 geodesic distance of the grid.
class BlochNet {
   public:
    struct Point {
        double theta;
        double phi;
        AmplitudePair pair;
    };

    /// Upper bound on size() * resolution^2 for resolution <= 2.
    static constexpr double kSizeConstant = 35.0;

    explicit BlochNet(double resolution);

    double resolution() const { return resolution_; }
    std::size_t size() const { return points_.size(); }
    const Point &operator[](std::size_t i) const { return points_[i]; }
    std::span<const Point> points() const { return points_; }

    /// Index of the nearest net point (by Bloch distance) and that distance.
    std::pair<std::size_t, double> nearest(const AmplitudePair &beta) const;

   private:
    double resolution_;
    std::vector<Point> points_;
};

inline BlochNet build_net(double resolution) { return BlochNet(resolution); }

struct FindCoeffsOptions {
    double net_scale = 1.0;  // net resolution = net_scale * eps_star
    frobenius::SigmaSampling sigma_mode = frobenius::SigmaSampling::kFaithful;
    bool keep_table = false;
};

struct CandidateScore {
    std::size_t net_index;
    double theta;
    double phi;
    double distance;  // estimated sqrt(1 - F)
};

struct FindCoeffsResult {
    AmplitudePair beta;
    std::size_t net_index = 0;
    std::size_t net_size = 0;
    double distance = 0.0;  // estimated sqrt(1 - F) of the chosen candidate
    std::vector<CandidateScore> table;
};

/// Frobenius accuracy giving scale * sqrt(eps_star) accuracy on the
/// sqrt(1 - F) scale.
double find_coeffs_gamma(double eps_star, double scale = 1.0);

/// Per-candidate failure budget 1e-4 eps_star^3 delta.
double find_coeffs_delta(double eps_star, double delta);

/// The nonadaptive plan Find-Coeffs consumes on a `qubits`-qubit node state.
frobenius::FrobeniusPlan plan_find_coeffs(int qubits, double eps_star, double delta, Rng &rng,
                                          const frobenius::Settings &settings, double accuracy_scale = 1.0);

/// Net search. Every net candidate is scored against the same rho outcomes
/// (laid out as in frobenius::estimate_from_outcomes, 0 = missing); the
/// candidate with the smallest estimated distance wins, ties to the lowest
/// net index. Candidate i draws its sigma-side randomness from the stream
/// (seed, i). Throws frobenius::MissingOutcomeError if any query lacks an
/// outcome.
FindCoeffsResult find_coeffs(const StateVector &hat0, const StateVector &hat1, const frobenius::FrobeniusPlan &plan,
                             std::span<const std::int8_t> outcomes, double eps_star, std::uint64_t seed,
                             const FindCoeffsOptions &options = {});

/// Tr(sigma P) for sigma = candidate_state(beta, hat0, hat1) for every label
/// in the plan, using a 2x2 reduction over the children.
class CandidateExpectations {
   public:
    CandidateExpectations(const frobenius::FrobeniusPlan &plan, const StateVector &hat0, const StateVector &hat1);
    void evaluate(const AmplitudePair &beta, std::vector<double> &out) const;

   private:
    // Per plan draw: <b|P0|b'> <hat_b|P'|hat_b'> for (b, b') in row-major order.
    std::vector<std::array<Amplitude, 4>> blocks_;
};

/// "net_index,theta,phi,distance" rows.
void write_table_csv(std::ostream &out, const FindCoeffsResult &result);

}  // namespace ptomo::gluing

#endif  // PTOMO_GLUING_HPP
