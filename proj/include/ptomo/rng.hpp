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

#ifndef PTOMO_RNG_HPP
#define PTOMO_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace ptomo {

using Rng = std::mt19937_64;

/// Seed for an independent stream derived from a master seed.
///
/// Streams are keyed by a component name and an index so that every subsystem
/// (plan building, measurement simulation, candidate scoring, trials) can be
/// replayed on its own. The derivation is FNV-1a over the name followed by two
/// rounds of splitmix64 mixing with the master seed and the index.
std::uint64_t derive_seed(std::uint64_t master, std::string_view component, std::uint64_t index = 0);

inline Rng make_stream(std::uint64_t master, std::string_view component, std::uint64_t index = 0) {
    return Rng(derive_seed(master, component, index));
}

std::uint64_t splitmix64(std::uint64_t x);

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(Rng &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace ptomo

#endif  // PTOMO_RNG_HPP
