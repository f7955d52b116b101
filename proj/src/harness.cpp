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

#include "ptomo/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ptomo/frobenius.hpp"
#include "ptomo/tomography.hpp"

namespace ptomo::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

std::ofstream open_output(const ExperimentConfig &config, const std::string &name) {
    fs::create_directories(config.out);
    std::ofstream f(fs::path(config.out) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (fs::path(config.out) / name).string());
    return f;
}

void write_config_copy(const ExperimentConfig &config) {
    auto f = open_output(config, "config.txt");
    f << provenance_header(config, "config") << config.serialize();
}

int report_validation(const std::vector<std::string> &problems, std::ostream &report) {
    for (const auto &p : problems) report << "invalid config: " << p << '\n';
    return kExitValidation;
}

json provenance_json(const ExperimentConfig &config) {
    return json{{"config_hash", config.hash_hex()}, {"seed", config.seed}, {"version", kVersion}};
}

std::size_t grid_position(const std::vector<double> &grid, double e) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] == e) return i;
    }
    throw std::logic_error("accuracy value not on the grid");
}

}  // namespace

std::size_t RunResult::failures() const {
    return static_cast<std::size_t>(std::count_if(trials.begin(), trials.end(), [](const TrialResult &t) { return t.failed; }));
}

TrialResult run_trial(const ExperimentConfig &config, int trial, const std::optional<StateVector> &fixed_state) {
    TrialResult out;
    out.trial = trial;
    const auto start = std::chrono::steady_clock::now();
    try {
        const auto t = static_cast<std::uint64_t>(trial);
        StateVector psi;
        if (fixed_state) {
            psi = *fixed_state;
        } else {
            Rng state_rng = make_stream(config.seed, "trial-state", t);
            psi = haar_random_state(config.n, state_rng);
        }
        const auto constants = config.effective_constants();
        const auto plan = tomography::build_measurement_set(config.n, config.eps, config.delta, constants,
                                                            derive_seed(config.seed, "trial-plan", t));
        out.copies_planned = static_cast<std::int64_t>(plan.total_copies);
        Rng measure_rng = make_stream(config.seed, "trial-measure", t);
        const auto log = tomography::execute_plan(plan, psi, measure_rng);
        const auto rec = tomography::reconstruct(plan, log, derive_seed(config.seed, "trial-reconstruct", t));
        out.fidelity = std::clamp(exact_fidelity(psi, rec.state), 0.0, 1.0);
        out.fallback_nodes = rec.fallback_count;
        for (const auto &node : rec.nodes) {
            out.nodes.push_back(NodeSummary{node.prefix.str(), tomography::to_string(node.status), node.eps_prime,
                                            node.distance});
            if (node.status == tomography::NodeStatus::kOk) {
                const auto g = plan.group_index(node.prefix.length, grid_position(plan.grid, node.eps_prime));
                out.copies_used += static_cast<std::int64_t>(log.hits(g, node.prefix.value));
            }
        }
        out.failed = out.fidelity < 1.0 - config.eps;
    } catch (const std::exception &e) {
        out.failed = true;
        out.error = e.what();
    }
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

RunResult run_trials(const ExperimentConfig &config, const std::optional<StateVector> &fixed_state, unsigned workers) {
    RunResult result;
    result.config_hash = config.hash_hex();
    result.seed = config.seed;
    result.trials.resize(static_cast<std::size_t>(std::max(0, config.trials)));
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, result.trials.size())));

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < result.trials.size();) {
            result.trials[i] = run_trial(config, static_cast<int>(i), fixed_state);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto &th : pool) th.join();
    return result;
}

int run_exit_code(const ExperimentConfig &config, const RunResult &result) {
    if (result.trials.empty()) return kExitOk;
    const double frac = static_cast<double>(result.failures()) / static_cast<double>(result.trials.size());
    return frac > config.max_failure_fraction ? kExitTrialFailures : kExitOk;
}

double fit_slope(const std::vector<double> &xs, const std::vector<double> &ys) {
    const double n = static_cast<double>(xs.size());
    if (xs.size() < 2) return std::nan("");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double den = n * sxx - sx * sx;
    return den == 0.0 ? std::nan("") : (n * sxy - sx * sy) / den;
}

int cmd_plan(const ExperimentConfig &config, std::ostream &report) {
    if (auto p = config.validate(); !p.empty()) return report_validation(p, report);
    const auto constants = config.effective_constants();
    const auto counts = tomography::count_measurement_set(config.n, config.eps, config.delta, constants);
    const auto total = tomography::total_copies(counts);

    write_config_copy(config);
    {
        auto f = open_output(config, "plan_counts.csv");
        f << provenance_header(config, "plan_counts") << kPlanCountsHeader << '\n';
        for (const auto &g : counts) {
            f << g.level << ',' << num(g.eps_prime) << ',' << g.queries << ',' << g.replication << ',' << g.copies
              << '\n';
        }
    }
    report << "total copies: " << total << '\n';
    report << "level  eps'        queries       R         copies\n";
    for (const auto &g : counts) {
        char line[160];
        std::snprintf(line, sizeof line, "%5d  %-10g %12lld %9lld %14lld\n", g.level, g.eps_prime,
                      static_cast<long long>(g.queries), static_cast<long long>(g.replication),
                      static_cast<long long>(g.copies));
        report << line;
    }
    if (config.paper_constants) {
        report << "paper constants: plan.txt not written (accounting only)\n";
        return kExitOk;
    }
    const auto plan = tomography::build_measurement_set(config.n, config.eps, config.delta, constants, config.seed);
    auto f = open_output(config, "plan.txt");
    f << provenance_header(config, "plan");
    tomography::write_plan(f, plan);
    report << "wrote " << (fs::path(config.out) / "plan.txt").string() << '\n';
    return kExitOk;
}

int cmd_run(const ExperimentConfig &config, std::ostream &report) {
    if (auto p = config.validate(); !p.empty()) return report_validation(p, report);
    std::optional<StateVector> fixed;
    if (!config.state_file.empty()) {
        try {
            fixed = read_state_file(config.state_file);
        } catch (const std::exception &e) {
            return report_validation({std::string("state_file: ") + e.what()}, report);
        }
        if (fixed->num_qubits() != config.n) {
            return report_validation({"state_file: state has " + std::to_string(fixed->num_qubits()) +
                                      " qubits but n = " + std::to_string(config.n)},
                                     report);
        }
    }
    const RunResult result = run_trials(config, fixed);

    write_config_copy(config);
    auto csv = open_output(config, "run.csv");
    auto sidecar = open_output(config, "run.jsonl");
    auto timing = open_output(config, "timing.csv");
    csv << provenance_header(config, "run") << kRunHeader << '\n';
    timing << provenance_header(config, "timing") << kTimingHeader << '\n';
    for (const auto &t : result.trials) {
        csv << t.trial << ',' << num(t.fidelity) << ',' << t.copies_planned << ',' << t.copies_used << ','
            << t.nodes.size() << ',' << t.fallback_nodes << ',' << (t.failed ? 1 : 0) << ',' << csv_field(t.error)
            << '\n';
        timing << t.trial << ',' << num(t.wall_seconds * 1e3) << '\n';
        json rec = provenance_json(config);
        rec["trial"] = t.trial;
        rec["fidelity"] = t.fidelity;
        rec["copies_planned"] = t.copies_planned;
        rec["copies_used"] = t.copies_used;
        rec["failed"] = t.failed;
        rec["error"] = t.error;
        json nodes = json::array();
        for (const auto &nd : t.nodes) {
            nodes.push_back({{"prefix", nd.prefix}, {"status", nd.status}, {"eps_prime", nd.eps_prime},
                             {"distance", nd.distance}});
        }
        rec["nodes"] = std::move(nodes);
        sidecar << rec.dump() << '\n';
    }

    double mean = 0.0;
    for (const auto &t : result.trials) mean += t.fidelity;
    if (!result.trials.empty()) mean /= static_cast<double>(result.trials.size());
    report << "trials: " << result.trials.size() << "  failures: " << result.failures()
           << "  mean fidelity: " << mean << '\n';
    for (const auto &t : result.trials) {
        if (!t.error.empty()) report << "trial " << t.trial << " error: " << t.error << '\n';
    }
    return run_exit_code(config, result);
}

int cmd_estimate(const ExperimentConfig &config, std::ostream &report) {
    auto problems = config.validate();
    if (config.rho_file.empty()) problems.push_back("rho_file: required");
    if (config.sigma_file.empty()) problems.push_back("sigma_file: required");
    if (!problems.empty()) return report_validation(problems, report);
    StateVector rho, sigma;
    try {
        rho = read_state_file(config.rho_file);
        sigma = read_state_file(config.sigma_file);
    } catch (const std::exception &e) {
        return report_validation({std::string("state file: ") + e.what()}, report);
    }
    if (rho.num_qubits() != sigma.num_qubits()) {
        return report_validation({"state files: dimension mismatch (" + std::to_string(rho.num_qubits()) + " vs " +
                                  std::to_string(sigma.num_qubits()) + " qubits)"},
                                 report);
    }
    if (rho.num_qubits() < 1) return report_validation({"state files: need at least one qubit"}, report);

    frobenius::Settings settings = config.effective_constants().frobenius;
    settings.median_reps = config.estimate_reps;
    const double oracle = exact_frobenius(rho, sigma);
    const int repeats = std::max(1, config.trials);

    write_config_copy(config);
    auto csv = open_output(config, "estimate.csv");
    csv << provenance_header(config, "estimate") << kEstimateHeader << '\n';
    int within = 0;
    std::int64_t copies = 0;
    for (int r = 0; r < repeats; ++r) {
        const auto ru = static_cast<std::uint64_t>(r);
        Rng plan_rng = make_stream(config.seed, "estimate-plan", ru);
        const auto plan = frobenius::make_plan(rho.num_qubits(), config.gamma, config.delta, plan_rng, settings);
        std::unique_ptr<frobenius::OutcomeSource> source;
        Rng device_rng = make_stream(config.seed, "estimate-rho", ru);
        if (config.expectation_source) {
            source = std::make_unique<frobenius::ExpectationSource>(rho, device_rng);
        } else {
            source = std::make_unique<frobenius::BornSource>(rho, device_rng);
        }
        Rng sigma_rng = make_stream(config.seed, "estimate-sigma", ru);
        const auto est = frobenius::estimate_distance(plan, *source, sigma, sigma_rng,
                                                      config.effective_constants().sigma_mode);
        const double err = std::abs(est.frobenius - oracle);
        within += err <= config.gamma;
        copies = static_cast<std::int64_t>(plan.total_queries());
        csv << r << ',' << num(est.frobenius) << ',' << num(oracle) << ',' << num(err) << ','
            << (err <= config.gamma ? 1 : 0) << ',' << copies << '\n';
    }
    report << "oracle ||rho - sigma||_F: " << oracle << '\n'
           << "repeats within gamma = " << config.gamma << ": " << within << '/' << repeats << '\n'
           << "rho copies per repeat: " << copies << " (sigma is simulated classically and not counted)\n";
    const double fail = 1.0 - static_cast<double>(within) / repeats;
    return fail > config.max_failure_fraction ? kExitTrialFailures : kExitOk;
}

int cmd_bench(const ExperimentConfig &config, std::ostream &report) {
    if (auto p = config.validate(); !p.empty()) return report_validation(p, report);
    write_config_copy(config);
    auto csv = open_output(config, "bench.csv");
    csv << provenance_header(config, "bench") << kBenchHeader << '\n';
    const auto constants = config.effective_constants();
    for (double eps : config.bench_eps) {
        std::vector<double> ns, logs;
        for (int n = config.bench_n_min; n <= config.bench_n_max; ++n) {
            const auto total =
                tomography::total_copies(tomography::count_measurement_set(n, eps, config.delta, constants));
            ns.push_back(n);
            logs.push_back(std::log2(static_cast<double>(total)));
            if (config.paper_constants) {
                csv << n << ',' << num(eps) << ",0," << total << ",,\n";
                continue;
            }
            ExperimentConfig point = config;
            point.n = n;
            point.eps = eps;
            for (int t = 0; t < config.trials; ++t) {
                const auto r = run_trial(point, t, std::nullopt);
                csv << n << ',' << num(eps) << ',' << t << ',' << r.copies_planned << ','
                    << (r.error.empty() ? num(r.fidelity) : std::string()) << ',' << num(r.wall_seconds * 1e3)
                    << '\n';
            }
        }
        if (ns.size() >= 2) {
            report << "eps " << eps << ": slope of log2(copies) vs n = " << fit_slope(ns, logs) << '\n';
        }
    }
    return kExitOk;
}

int cmd_selftest(const ExperimentConfig &config, std::ostream &report) {
    int failed = 0;
    auto check = [&](const char *name, bool ok, const std::string &detail) {
        report << (ok ? "ok   " : "FAIL ") << name << "  " << detail << '\n';
        failed += !ok;
    };
    Rng rng = make_stream(config.seed, "selftest");

    {
        const auto a = haar_random_state(2, rng);
        const auto b = haar_random_state(2, rng);
        double acc = 0.0;
        for (std::uint64_t i = 0; i < 16; ++i) {
            const auto p = PauliLabel::from_index(i, 2);
            const double v = exact_pauli_expectation(a, p) - exact_pauli_expectation(b, p);
            acc += v * v;
        }
        const double lhs = exact_frobenius(a, b);
        const double rhs = std::sqrt(acc / 4.0);
        check("pauli-identity", std::abs(lhs - rhs) < 1e-9, num(lhs) + " vs " + num(rhs));
    }
    {
        const auto plus = StateVector::from_amplitudes({1, 1, 1, 1});
        const BornSampler sampler(plus, 0, MeasurementBasis::parse("ZZ"));
        std::array<int, 4> hist{};
        const int draws = 20000;
        for (int i = 0; i < draws; ++i) ++hist[sampler.draw_index(rng)];
        bool ok = true;
        for (int h : hist) ok &= std::abs(h / static_cast<double>(draws) - 0.25) < 0.02;
        check("born-sampler", ok, "uniform within 0.02");
    }
    {
        const auto c = tomography::Constants::paper();
        const auto t2 = tomography::total_copies(tomography::count_measurement_set(2, 0.1, 0.1, c));
        const auto t3 = tomography::total_copies(tomography::count_measurement_set(3, 0.1, 0.1, c));
        check("accounting", t3 >= 2 * t2, "total(3)/total(2) = " + num(static_cast<double>(t3) / t2));
    }
    {
        ExperimentConfig probe;
        probe.n = 2;
        probe.eps = 0.3;
        probe.seed = config.seed;
        const auto r = run_trial(probe, 0, std::nullopt);
        check("tomography", r.error.empty() && r.fidelity >= 0.7, "n=2 eps=0.3 fidelity " + num(r.fidelity));
    }
    {
        std::istringstream in(config.serialize());
        ExperimentConfig copy;
        copy.apply(in);
        check("config-roundtrip", copy.hash() == config.hash(), config.hash_hex());
    }
    return failed == 0 ? kExitOk : kExitTrialFailures;
}

}  // namespace ptomo::harness
