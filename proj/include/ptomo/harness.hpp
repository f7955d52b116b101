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

#ifndef PTOMO_HARNESS_HPP
#define PTOMO_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ptomo/config.hpp"
#include "ptomo/state.hpp"

namespace ptomo::harness {

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitTrialFailures = 3 };

struct NodeSummary {
    std::string prefix;
    std::string status;
    double eps_prime = 0.0;
    double distance = 0.0;
};

struct TrialResult {
    int trial = 0;
    double fidelity = 0.0;
    std::int64_t copies_planned = 0;
    std::int64_t copies_used = 0;  // copies in the bins the reconstruction read
    std::size_t fallback_nodes = 0;
    std::vector<NodeSummary> nodes;
    double wall_seconds = 0.0;
    bool failed = false;  // fidelity below 1 - eps, or an exception
    std::string error;
};

struct RunResult {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::vector<TrialResult> trials;

    std::size_t failures() const;
};

/// One plan -> execute -> reconstruct cycle. Streams derive from
/// (config.seed, trial) so the result does not depend on scheduling.
TrialResult run_trial(const ExperimentConfig &config, int trial, const std::optional<StateVector> &fixed_state);

/// Runs every trial on a worker pool; results are ordered by trial.
RunResult run_trials(const ExperimentConfig &config, const std::optional<StateVector> &fixed_state,
                     unsigned workers = 0);

/// Exit code for a finished run given the configured failure threshold.
int run_exit_code(const ExperimentConfig &config, const RunResult &result);

/// Least-squares slope of ys against xs.
double fit_slope(const std::vector<double> &xs, const std::vector<double> &ys);

// Subcommands. Each validates the config, writes its files under config.out,
// prints a report to `report`, and returns an ExitCode.
int cmd_plan(const ExperimentConfig &config, std::ostream &report);
int cmd_run(const ExperimentConfig &config, std::ostream &report);
int cmd_estimate(const ExperimentConfig &config, std::ostream &report);
int cmd_bench(const ExperimentConfig &config, std::ostream &report);
int cmd_selftest(const ExperimentConfig &config, std::ostream &report);

// CSV headers, kept here so the schema tests and the writers agree.
inline constexpr const char *kPlanCountsHeader = "level,eps_prime,queries,replication,copies";
inline constexpr const char *kRunHeader =
    "trial,fidelity,copies_planned,copies_used,nodes,fallback_nodes,failed,error";
inline constexpr const char *kTimingHeader = "trial,wall_ms";
inline constexpr const char *kEstimateHeader = "repeat,d_hat,oracle,error,within_gamma,rho_copies";
inline constexpr const char *kBenchHeader = "n,eps,trial,planned_copies,fidelity,runtime_ms";

}  // namespace ptomo::harness

#endif  // PTOMO_HARNESS_HPP
