/*
 * Copyright 2026 The qmarg Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


// qmarg command-line tool. Exit codes: 0 success, 1 failed check or
// contest expectation, 2 input error.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qmarg/errors.hpp"
#include "qmarg/io.hpp"
#include "qmarg/marginals.hpp"
#include "qmarg/oracle.hpp"
#include "qmarg/parallel.hpp"
#include "qmarg/permanent.hpp"
#include "qmarg/sampler.hpp"
#include "qmarg/selfcheck.hpp"
#include "qmarg/verify.hpp"

#ifndef QMARG_DEFAULT_FIXTURES
#define QMARG_DEFAULT_FIXTURES "fixtures"
#endif

namespace {

using namespace qmarg;
using io::Json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInputError = 2;

/// Enumeration bounds, overridable through the environment.
struct Limits {
    std::size_t state_terms = kDefaultMaxTerms;
    std::size_t plan_terms = kDefaultMaxPlanTerms;
    std::size_t patterns = oracle::kMaxOraclePatterns;

    static Limits from_env() {
        Limits l;
        l.state_terms = env_size("QMARG_MAX_STATE_TERMS", l.state_terms);
        l.plan_terms = env_size("QMARG_MAX_PLAN_TERMS", l.plan_terms);
        l.patterns = env_size("QMARG_MAX_PATTERNS", l.patterns);
        return l;
    }

    static std::size_t env_size(const char* name, std::size_t fallback) {
        const char* raw = std::getenv(name);
        if (!raw || !*raw) return fallback;
        std::size_t used = 0;
        unsigned long long value = 0;
        try {
            value = std::stoull(raw, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || raw[used] != '\0' || value == 0) {
            throw InvalidQueryError(std::string("environment variable ") + name + " must be a positive integer");
        }
        return static_cast<std::size_t>(value);
    }
};

struct Common {
    std::string unitary;
    std::string state;
    double x = 1.0;
    std::optional<std::size_t> j_max;
    std::size_t workers = 0;
    std::string out;
};

Interferometer load_unitary(const std::string& path) {
    return io::interferometer_from_json(io::read_json_file(path));
}

io::StateSpec load_spec(const std::string& path, const Limits& limits) {
    auto spec = io::state_spec_from_json(io::read_json_file(path));
    spec.max_terms = limits.state_terms;
    return spec;
}

std::size_t resolve_workers(std::size_t requested) {
    return requested == 0 ? default_workers() : requested;
}

/// Writes to --out when given, stdout otherwise.
void emit(const std::string& out, const std::string& text) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream file(out, std::ios::binary);
    if (!file) throw ParseError("cannot write '" + out + "'");
    file << text;
}

void emit_json(const std::string& out, const Json& doc) {
    emit(out, doc.dump(2) + "\n");
}

ComplexMatrix matrix_from_json(const Json& doc) {
    if (!doc.contains("re") || !doc["re"].is_array()) throw ParseError("missing field 're'");
    const auto re = doc["re"].get<std::vector<std::vector<double>>>();
    const auto im = doc.contains("im") ? doc["im"].get<std::vector<std::vector<double>>>()
                                       : std::vector<std::vector<double>>(re.size(), std::vector<double>());
    if (im.size() != re.size()) throw ParseError("field 'im' must have as many rows as 're'");
    const std::size_t rows = re.size();
    const std::size_t cols = rows ? re[0].size() : 0;
    std::vector<Complex> entries;
    for (std::size_t i = 0; i < rows; ++i) {
        if (re[i].size() != cols) throw ParseError("field 're' rows must have equal length");
        if (!im[i].empty() && im[i].size() != cols) throw ParseError("field 'im' rows must match 're'");
        for (std::size_t j = 0; j < cols; ++j) entries.emplace_back(re[i][j], im[i].empty() ? 0.0 : im[i][j]);
    }
    return ComplexMatrix(rows, cols, std::move(entries));
}

std::map<std::size_t, double> parse_n_distribution(const std::string& text) {
    std::map<std::size_t, double> dist;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        try {
            if (colon == std::string::npos) throw std::invalid_argument(item);
            dist[std::stoul(item.substr(0, colon))] += std::stod(item.substr(colon + 1));
        } catch (const std::exception&) {
            throw ParseError("field '--n-dist' entries must look like n:p, got '" + item + "'");
        }
    }
    if (dist.empty()) throw ParseError("field '--n-dist' is empty");
    return dist;
}

std::vector<Sample> load_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return io::read_samples(in).samples;
}

int cmd_perm(const std::string& matrix_path, const std::string& unitary_path, const std::string& rows,
             const std::string& cols, const std::string& out) {
    ComplexMatrix m;
    if (!matrix_path.empty()) {
        m = matrix_from_json(io::read_json_file(matrix_path));
    } else {
        const auto u = load_unitary(unitary_path);
        m = rows.empty() ? u.matrix() : submatrix(u, io::parse_pattern_key(rows), io::parse_pattern_key(cols));
    }
    const Complex p = permanent(m);
    emit_json(out, Json{{"re", p.real()}, {"im", p.imag()}, {"abs2", std::norm(p)}});
    return kExitOk;
}

int cmd_marginal(const Common& c, std::optional<std::size_t> k, const std::string& pattern, bool ordered,
                 const Limits& limits) {
    const auto u = load_unitary(c.unitary);
    const auto state = load_spec(c.state, limits).build(u.n_modes());
    if (!pattern.empty()) {
        MarginalQuery q{OutputPattern{io::parse_pattern_key(pattern), ordered}, Distinguishability(c.x), c.j_max,
                        limits.plan_terms};
        const double p = c.j_max ? truncated_marginal(u, state, q) : marginal_probability(u, state, q);
        emit_json(c.out, Json{{"pattern", q.pattern.modes},
                              {"ordered", ordered},
                              {"probability", p},
                              {"x", c.x},
                              {"j_max", c.j_max ? Json(*c.j_max) : Json(nullptr)}});
        return kExitOk;
    }
    if (!k) throw InvalidQueryError("marginal needs --k or --pattern");
    DistributionOptions options;
    options.max_patterns = limits.patterns;
    options.max_plan_terms = limits.plan_terms;
    options.workers = resolve_workers(c.workers);
    const auto table = marginal_distribution(u, state, *k, Distinguishability(c.x).x(), c.j_max, options);
    emit_json(c.out, io::marginal_table_to_json(table, *k, c.x, c.j_max));
    return kExitOk;
}

int cmd_distribution(const Common& c, bool classical, const Limits& limits) {
    const auto u = load_unitary(c.unitary);
    const auto state = load_spec(c.state, limits).build(u.n_modes());
    const double x = Distinguishability(c.x).x();
    const auto d = classical ? oracle::classical_distribution(u, state, limits.patterns)
                             : oracle::full_distribution(u, state, x, limits.patterns);
    emit_json(c.out, io::distribution_to_json(d, classical ? 0.0 : x));
    return kExitOk;
}

int cmd_sample(const Common& c, std::uint64_t seed, std::size_t count, std::optional<double> loss,
               const std::string& n_dist, const Limits& limits) {
    const auto u = load_unitary(c.unitary);
    const auto spec = load_spec(c.state, limits);
    SamplerConfig cfg;
    cfg.seed = seed;
    cfg.distinguishability = Distinguishability(c.x);
    cfg.j_max = c.j_max;
    cfg.loss_eta = loss;
    cfg.workers = resolve_workers(c.workers);
    if (!n_dist.empty()) cfg.n_distribution = parse_n_distribution(n_dist);

    const std::size_t n_modes = u.n_modes();
    const StateSource source = [&](std::size_t n) {
        return cfg.n_distribution ? spec.build(n_modes, n) : spec.build(n_modes);
    };
    const auto run = sample(u, source, cfg, count);
    std::ostringstream text;
    io::write_samples(text, io::sampler_header(cfg, count, n_modes, run.stats), run.samples);
    emit(c.out, text.str());
    return kExitOk;
}

int cmd_contest(const Common& c, const std::string& a_path, const std::string& b_path, std::uint64_t seed,
                std::size_t resamples, const std::string& expect, const Limits& limits) {
    const auto u = load_unitary(c.unitary);
    const auto state = load_spec(c.state, limits).build(u.n_modes());
    ContestOptions options;
    options.seed = seed;
    options.bootstrap_resamples = resamples;
    const auto result = likelihood_contest(u, state, Distinguishability(c.x).x(), load_samples(a_path),
                                           load_samples(b_path), options);
    emit_json(c.out, io::contest_to_json(result));
    if (!expect.empty() && expect != to_string(result.winner)) {
        std::cerr << "qmarg: contest winner " << to_string(result.winner) << ", expected " << expect << '\n';
        return kExitCheckFailed;
    }
    return kExitOk;
}

int cmd_report(const Common& c, const std::string& samples_path, std::size_t k, const std::string& reference_path,
               std::optional<double> max_z, const Limits& limits) {
    const auto samples = load_samples(samples_path);
    std::map<std::vector<int>, double> reference;
    if (!reference_path.empty()) {
        reference = io::marginal_table_from_json(io::read_json_file(reference_path));
    } else {
        if (c.unitary.empty() || c.state.empty()) throw InvalidQueryError("report needs --reference or --unitary and --state");
        const auto u = load_unitary(c.unitary);
        const auto state = load_spec(c.state, limits).build(u.n_modes());
        DistributionOptions options;
        options.max_patterns = limits.patterns;
        options.max_plan_terms = limits.plan_terms;
        options.workers = resolve_workers(c.workers);
        reference = marginal_distribution(u, state, k, Distinguishability(c.x).x(), c.j_max, options);
    }
    const auto rows = marginal_report(samples, k, reference);
    Json table = Json::array();
    double worst = 0.0;
    for (const auto& r : rows) {
        worst = std::max(worst, std::abs(r.z));
        table.push_back({{"pattern", r.pattern},
                         {"empirical", r.empirical},
                         {"reference", r.reference},
                         {"std_error", r.std_error},
                         {"z", r.z}});
    }
    emit_json(c.out, Json{{"k", k}, {"n_samples", samples.size()}, {"max_abs_z", worst}, {"rows", table}});
    if (max_z && worst > *max_z) {
        std::cerr << "qmarg: max |z| " << worst << " exceeds " << *max_z << '\n';
        return kExitCheckFailed;
    }
    return kExitOk;
}

int cmd_selfcheck(const std::string& scale, std::string fixtures, std::size_t workers) {
    if (fixtures.empty()) {
        const char* env = std::getenv("QMARG_FIXTURES");
        fixtures = env && *env ? env : QMARG_DEFAULT_FIXTURES;
    }
    const auto results = selfcheck::run(scale == "medium" ? selfcheck::Scale::medium : selfcheck::Scale::small,
                                        fixtures, resolve_workers(workers));
    bool all = true;
    std::cout << std::left << std::setw(32) << "check" << std::setw(6) << "ok" << std::setw(12) << "residual"
              << std::setw(10) << "tol" << "detail\n";
    for (const auto& r : results) {
        all = all && r.passed;
        std::cout << std::left << std::setw(32) << r.name << std::setw(6) << (r.passed ? "PASS" : "FAIL")
                  << std::setw(12) << std::setprecision(3) << std::scientific << r.residual << std::setw(10)
                  << r.tolerance << r.detail << '\n';
    }
    return all ? kExitOk : kExitCheckFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qmarg: marginal probabilities and samplers for partially distinguishable boson sampling"};
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub, bool needs_state) {
        auto* u = sub->add_option("--unitary", common.unitary, "interferometer JSON")->check(CLI::ExistingFile);
        auto* s = sub->add_option("--state", common.state, "state spec JSON")->check(CLI::ExistingFile);
        if (needs_state) {
            u->required();
            s->required();
        }
        sub->add_option("--x", common.x, "pairwise photon overlap in [0, 1]")->check(CLI::Range(0.0, 1.0));
        sub->add_option("--workers", common.workers, "worker threads (0 = all cores)");
        sub->add_option("--out", common.out, "output file (default stdout)");
    };

    auto* perm = app.add_subcommand("perm", "permanent of a matrix or unitary submatrix");
    std::string matrix_path, rows, cols;
    auto* matrix_opt = perm->add_option("--matrix", matrix_path, "square matrix JSON {re, im}")->check(CLI::ExistingFile);
    auto* perm_unitary = perm->add_option("--unitary", common.unitary, "interferometer JSON")->check(CLI::ExistingFile);
    perm->add_option("--rows", rows, "row list, e.g. 0,1,1")->needs(perm_unitary);
    perm->add_option("--cols", cols, "column list")->needs(perm_unitary);
    perm->add_option("--out", common.out, "output file (default stdout)");
    matrix_opt->excludes(perm_unitary);

    auto* marginal = app.add_subcommand("marginal", "k-photon marginal of one pattern or all k-subsets");
    add_common(marginal, true);
    std::optional<std::size_t> k;
    std::string pattern;
    bool ordered = false;
    marginal->add_option("--k", k, "marginal order for a full table");
    marginal->add_option("--pattern", pattern, "distinct output modes, e.g. 0,3");
    marginal->add_flag("--ordered", ordered, "expanded-space (ordered) probability");
    marginal->add_option("--jmax", common.j_max, "keep interference orders <= jmax");

    auto* distribution = app.add_subcommand("distribution", "brute-force full output distribution");
    add_common(distribution, true);
    bool classical = false;
    distribution->add_flag("--classical", classical, "independent-particle routing instead of --x");

    auto* sample_cmd = app.add_subcommand("sample", "chain-rule samples as JSON Lines");
    add_common(sample_cmd, true);
    std::uint64_t seed = 0;
    std::size_t count = 1000;
    std::optional<double> loss;
    std::string n_dist;
    sample_cmd->add_option("--seed", seed, "random seed");
    sample_cmd->add_option("--count", count, "number of samples");
    sample_cmd->add_option("--jmax", common.j_max, "truncated (spoofing) sampler");
    sample_cmd->add_option("--loss", loss, "per-photon survival probability")->check(CLI::Range(0.0, 1.0));
    sample_cmd->add_option("--n-dist", n_dist, "photon-number distribution, e.g. 2:0.5,4:0.5");

    auto* contest = app.add_subcommand("contest", "log-likelihood contest between two sample files");
    add_common(contest, true);
    std::string a_path, b_path, expect;
    std::size_t resamples = 1000;
    contest->add_option("--a", a_path, "samples A (JSONL)")->required()->check(CLI::ExistingFile);
    contest->add_option("--b", b_path, "samples B (JSONL)")->required()->check(CLI::ExistingFile);
    contest->add_option("--seed", seed, "bootstrap seed");
    contest->add_option("--resamples", resamples, "bootstrap resamples");
    contest->add_option("--expect", expect, "exit 1 unless the winner is A, B or tie")
        ->check(CLI::IsMember({"A", "B", "tie"}));

    auto* report = app.add_subcommand("report", "empirical k-marginals against a reference table");
    add_common(report, false);
    std::string samples_path, reference_path;
    std::size_t report_k = 1;
    std::optional<double> max_z;
    report->add_option("--samples", samples_path, "samples (JSONL)")->required()->check(CLI::ExistingFile);
    report->add_option("--k", report_k, "marginal order");
    report->add_option("--reference", reference_path, "marginal table JSON")->check(CLI::ExistingFile);
    report->add_option("--jmax", common.j_max, "truncate the computed reference");
    report->add_option("--max-z", max_z, "exit 1 if any |z| exceeds this");

    auto* selfcheck_cmd = app.add_subcommand("selfcheck", "oracle-equivalence and identity checks");
    std::string scale = "small", fixtures;
    selfcheck_cmd->add_option("--scale", scale, "small or medium")->check(CLI::IsMember({"small", "medium"}));
    selfcheck_cmd->add_option("--fixtures", fixtures, "fixture directory");
    selfcheck_cmd->add_option("--workers", common.workers, "worker threads (0 = all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        const Limits limits = Limits::from_env();
        if (*perm) {
            if (matrix_path.empty() && common.unitary.empty()) throw InvalidQueryError("perm needs --matrix or --unitary");
            if (rows.empty() != cols.empty()) throw InvalidQueryError("perm needs both --rows and --cols");
            return cmd_perm(matrix_path, common.unitary, rows, cols, common.out);
        }
        if (*marginal) return cmd_marginal(common, k, pattern, ordered, limits);
        if (*distribution) return cmd_distribution(common, classical, limits);
        if (*sample_cmd) return cmd_sample(common, seed, count, loss, n_dist, limits);
        if (*contest) return cmd_contest(common, a_path, b_path, seed, resamples, expect, limits);
        if (*report) return cmd_report(common, samples_path, report_k, reference_path, max_z, limits);
        if (*selfcheck_cmd) return cmd_selfcheck(scale, fixtures, common.workers);
    } catch (const ConsistencyError& e) {
        std::cerr << "qmarg: internal consistency error: " << e.what() << '\n';
        return kExitCheckFailed;
    } catch (const Error& e) {
        std::cerr << "qmarg: " << e.what() << '\n';
        return kExitInputError;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "qmarg: malformed JSON: " << e.what() << '\n';
        return kExitInputError;
    }
    return kExitInputError;
}
