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

#include "ptomo/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

namespace ptomo::harness {

namespace {

std::string join(const std::vector<std::string> &items) {
    std::string s;
    for (const auto &i : items) s += (s.empty() ? "" : "; ") + i;
    return s;
}

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string &key, const std::string &v) {
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception &) {
        throw ConfigError({key + ": expected a number, got \"" + v + "\""});
    }
}

long long parse_int(const std::string &key, const std::string &v) {
    long long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError({key + ": expected an integer, got \"" + v + "\""});
    }
    return out;
}

bool parse_bool(const std::string &key, const std::string &v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError({key + ": expected true/false, got \"" + v + "\""});
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::invalid_argument(join(problems)), problems_(std::move(problems)) {}

tomography::Constants ExperimentConfig::effective_constants() const {
    if (!paper_constants) return constants;
    auto c = tomography::Constants::paper();
    c.sigma_mode = constants.sigma_mode;
    return c;
}

std::string ExperimentConfig::serialize() const {
    std::ostringstream o;
    const auto &c = constants;
    o << "n = " << n << '\n'
      << "eps = " << fmt_double(eps) << '\n'
      << "delta = " << fmt_double(delta) << '\n'
      << "seed = " << seed << '\n'
      << "trials = " << trials << '\n'
      << "C = " << fmt_double(c.budget) << '\n'
      << "poly_exponent = " << c.poly_exponent << '\n'
      << "K = " << c.frobenius.median_reps << '\n'
      << "m0 = " << c.frobenius.base_samples << '\n'
      << "accuracy_scale = " << fmt_double(c.accuracy_scale) << '\n'
      << "net_scale = " << fmt_double(c.net_scale) << '\n'
      << "rescale_accuracy = " << (c.rescale_accuracy ? "true" : "false") << '\n'
      << "variance_reduced = "
      << (c.sigma_mode == frobenius::SigmaSampling::kVarianceReduced ? "true" : "false") << '\n'
      << "paper_constants = " << (paper_constants ? "true" : "false") << '\n'
      << "out = " << out << '\n'
      << "state_file = " << state_file << '\n'
      << "max_failure_fraction = " << fmt_double(max_failure_fraction) << '\n'
      << "rho_file = " << rho_file << '\n'
      << "sigma_file = " << sigma_file << '\n'
      << "gamma = " << fmt_double(gamma) << '\n'
      << "estimate_reps = " << estimate_reps << '\n'
      << "expectation_source = " << (expectation_source ? "true" : "false") << '\n'
      << "bench_n_min = " << bench_n_min << '\n'
      << "bench_n_max = " << bench_n_max << '\n'
      << "bench_eps =";
    for (double e : bench_eps) o << ' ' << fmt_double(e);
    o << '\n';
    return o.str();
}

std::uint64_t ExperimentConfig::hash() const {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char ch : serialize()) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string ExperimentConfig::hash_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
    return buf;
}

std::vector<std::string> ExperimentConfig::validate() const {
    std::vector<std::string> p;
    const auto &c = constants;
    if (n < 1 || n > 12) p.push_back("n: must lie in [1, 12]");
    if (!(eps > 0.0 && eps <= 1.0)) p.push_back("eps: must lie in (0, 1]");
    if (!(delta > 0.0 && delta < 1.0)) p.push_back("delta: must lie in (0, 1)");
    if (trials < 0) p.push_back("trials: must be >= 0");
    if (!(c.budget >= 1.0)) p.push_back("C: must be >= 1");
    if (c.poly_exponent < 0 || c.poly_exponent > 8) p.push_back("poly_exponent: must lie in [0, 8]");
    if (c.frobenius.median_reps < 0 || (c.frobenius.median_reps > 0 && c.frobenius.median_reps % 2 == 0)) {
        p.push_back("K: must be odd, or 0 for the median formula");
    }
    if (c.frobenius.base_samples < 0 || c.frobenius.base_samples % 4 != 0) {
        p.push_back("m0: must be a multiple of 4, or 0 for 2000 ln(1/alpha)");
    }
    if (!(c.accuracy_scale > 0.0 && c.accuracy_scale <= 1.0)) p.push_back("accuracy_scale: must lie in (0, 1]");
    if (!(c.net_scale > 0.0)) p.push_back("net_scale: must be positive");
    if (!(max_failure_fraction >= 0.0 && max_failure_fraction <= 1.0)) {
        p.push_back("max_failure_fraction: must lie in [0, 1]");
    }
    if (!(gamma > 0.0)) p.push_back("gamma: must be positive");
    if (estimate_reps < 1 || estimate_reps % 2 == 0) p.push_back("estimate_reps: must be a positive odd integer");
    if (bench_n_min < 1 || bench_n_max > 12) p.push_back("bench_n_min/bench_n_max: must lie in [1, 12]");
    for (double e : bench_eps) {
        if (!(e > 0.0 && e <= 1.0)) {
            p.push_back("bench_eps: every value must lie in (0, 1]");
            break;
        }
    }
    if (out.empty()) p.push_back("out: must not be empty");
    return p;
}

void ExperimentConfig::validate_or_throw() const {
    auto p = validate();
    if (!p.empty()) throw ConfigError(std::move(p));
}

void ExperimentConfig::set(const std::string &key, const std::string &value) {
    auto &c = constants;
    if (key == "n") n = static_cast<int>(parse_int(key, value));
    else if (key == "eps") eps = parse_double(key, value);
    else if (key == "delta") delta = parse_double(key, value);
    else if (key == "seed") seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "trials") trials = static_cast<int>(parse_int(key, value));
    else if (key == "C") c.budget = parse_double(key, value);
    else if (key == "poly_exponent") c.poly_exponent = static_cast<int>(parse_int(key, value));
    else if (key == "K") c.frobenius.median_reps = static_cast<int>(parse_int(key, value));
    else if (key == "m0") c.frobenius.base_samples = parse_int(key, value);
    else if (key == "accuracy_scale") c.accuracy_scale = parse_double(key, value);
    else if (key == "net_scale") c.net_scale = parse_double(key, value);
    else if (key == "rescale_accuracy") c.rescale_accuracy = parse_bool(key, value);
    else if (key == "variance_reduced") {
        c.sigma_mode = parse_bool(key, value) ? frobenius::SigmaSampling::kVarianceReduced
                                              : frobenius::SigmaSampling::kFaithful;
    } else if (key == "paper_constants") paper_constants = parse_bool(key, value);
    else if (key == "out") out = value;
    else if (key == "state_file") state_file = value;
    else if (key == "max_failure_fraction") max_failure_fraction = parse_double(key, value);
    else if (key == "rho_file") rho_file = value;
    else if (key == "sigma_file") sigma_file = value;
    else if (key == "gamma") gamma = parse_double(key, value);
    else if (key == "estimate_reps") estimate_reps = static_cast<int>(parse_int(key, value));
    else if (key == "expectation_source") expectation_source = parse_bool(key, value);
    else if (key == "bench_n_min") bench_n_min = static_cast<int>(parse_int(key, value));
    else if (key == "bench_n_max") bench_n_max = static_cast<int>(parse_int(key, value));
    else if (key == "bench_eps") {
        bench_eps.clear();
        std::istringstream items(value);
        std::string item;
        while (items >> item) bench_eps.push_back(parse_double(key, item));
    } else {
        throw ConfigError({key + ": unknown key"});
    }
}

void ExperimentConfig::apply(std::istream &in) {
    std::vector<std::string> problems;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            problems.push_back("line " + std::to_string(line_no) + ": expected \"key = value\"");
            continue;
        }
        try {
            set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ConfigError &e) {
            problems.insert(problems.end(), e.problems().begin(), e.problems().end());
        }
    }
    if (!problems.empty()) throw ConfigError(std::move(problems));
}

void ExperimentConfig::apply_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"constants-file: cannot open " + path});
    apply(in);
}

std::string provenance_header(const ExperimentConfig &config, const std::string &kind) {
    return "# ptomo " + kind + " version=" + kVersion + " config_hash=" + config.hash_hex() +
           " seed=" + std::to_string(config.seed) + "\n";
}

}  // namespace ptomo::harness
