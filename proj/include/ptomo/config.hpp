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

#ifndef PTOMO_CONFIG_HPP
#define PTOMO_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "ptomo/tomography.hpp"

namespace ptomo::harness {

inline constexpr const char *kVersion = "0.3.0";

/// Raised with one message per offending field.
class ConfigError : public std::invalid_argument {
   public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string> &problems() const { return problems_; }

   private:
    std::vector<std::string> problems_;
};

/// Everything a command needs. Serializes to flat "key = value" text; the
/// FNV-1a hash of that text tags every output file.
struct ExperimentConfig {
    int n = 2;
    double eps = 0.1;
    double delta = 0.1;
    std::uint64_t seed = 1;
    int trials = 1;
    tomography::Constants constants = tomography::Constants::desk();
    bool paper_constants = false;
    std::string out = "ptomo-out";
    std::string state_file;  // run: fixed input state instead of Haar samples
    double max_failure_fraction = 0.2;

    // estimate
    std::string rho_file;
    std::string sigma_file;
    double gamma = 0.25;
    int estimate_reps = 15;  // K for the estimate command
    bool expectation_source = false;

    // bench
    int bench_n_min = 2;
    int bench_n_max = 4;
    std::vector<double> bench_eps{0.2};

    /// Constants actually used: paper() when paper_constants is set.
    tomography::Constants effective_constants() const;

    std::string serialize() const;
    std::uint64_t hash() const;
    std::string hash_hex() const;

    /// Field-level problems; empty when valid.
    std::vector<std::string> validate() const;
    void validate_or_throw() const;

    /// Applies "key = value" lines onto this config. Unknown keys and bad
    /// values are reported together as a ConfigError.
    void apply(std::istream &in);
    void apply_file(const std::string &path);
    void set(const std::string &key, const std::string &value);
};

/// Comment block embedded at the top of every output file.
std::string provenance_header(const ExperimentConfig &config, const std::string &kind);

}  // namespace ptomo::harness

#endif  // PTOMO_CONFIG_HPP
