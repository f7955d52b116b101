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

// Command-line front end: plan, run, estimate, bench, selftest.

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "ptomo/config.hpp"
#include "ptomo/harness.hpp"

using namespace ptomo::harness;

namespace {

struct Flags {
    std::string constants_file;
    std::map<std::string, std::string> overrides;
    bool paper_constants = false;
};

// Registers the shared flags; values land in `flags.overrides` so they apply
// after the constants file.
void add_common(CLI::App *cmd, Flags &flags) {
    auto opt = [&](const char *name, const char *key, const char *help) {
        cmd->add_option_function<std::string>(
            name, [&flags, key](const std::string &v) { flags.overrides[key] = v; }, help);
    };
    opt("--n", "n", "qubit count");
    opt("--eps", "eps", "target infidelity");
    opt("--delta", "delta", "failure probability");
    opt("--seed", "seed", "master seed");
    opt("--trials", "trials", "trial count (repeat count for estimate)");
    opt("--out", "out", "output directory");
    cmd->add_option("--constants-file", flags.constants_file, "flat key = value config file");
    cmd->add_flag("--paper-constants", flags.paper_constants, "use the full theoretical constants");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"ptomo: nonadaptive pure-state tomography simulator"};
    app.require_subcommand(1);
    Flags flags;

    auto *plan = app.add_subcommand("plan", "build the measurement set and report its size");
    auto *run = app.add_subcommand("run", "simulate tomography trials and score fidelity");
    auto *estimate = app.add_subcommand("estimate", "estimate ||rho - sigma||_F from simulated copies");
    auto *bench = app.add_subcommand("bench", "copy-count and fidelity scaling over n and eps");
    auto *selftest = app.add_subcommand("selftest", "quick internal consistency checks");
    for (auto *cmd : {plan, run, estimate, bench, selftest}) add_common(cmd, flags);

    auto extra = [&](CLI::App *cmd, const char *name, const char *key, const char *help) {
        cmd->add_option_function<std::string>(
            name, [&flags, key](const std::string &v) { flags.overrides[key] = v; }, help);
    };
    extra(run, "--state", "state_file", "fixed input state file instead of Haar samples");
    extra(estimate, "--rho", "rho_file", "state file for rho");
    extra(estimate, "--sigma", "sigma_file", "state file for sigma");
    extra(estimate, "--gamma", "gamma", "Frobenius accuracy");
    extra(estimate, "--reps", "estimate_reps", "median repetitions K (odd)");
    extra(bench, "--n-min", "bench_n_min", "smallest n");
    extra(bench, "--n-max", "bench_n_max", "largest n");
    extra(bench, "--eps-list", "bench_eps", "space-separated eps values");

    CLI11_PARSE(app, argc, argv);

    ExperimentConfig config;
    try {
        if (!flags.constants_file.empty()) config.apply_file(flags.constants_file);
        for (const auto &[key, value] : flags.overrides) config.set(key, value);
        if (flags.paper_constants) config.paper_constants = true;
    } catch (const ConfigError &e) {
        for (const auto &p : e.problems()) std::cerr << "invalid config: " << p << '\n';
        return kExitValidation;
    }

    try {
        if (*plan) return cmd_plan(config, std::cout);
        if (*run) return cmd_run(config, std::cout);
        if (*estimate) return cmd_estimate(config, std::cout);
        if (*bench) return cmd_bench(config, std::cout);
        return cmd_selftest(config, std::cout);
    } catch (const std::invalid_argument &e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
