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


#include "qmarg/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "qmarg/errors.hpp"
#include "qmarg/io.hpp"
#include "qmarg/marginals.hpp"
#include "qmarg/oracle.hpp"
#include "qmarg/parallel.hpp"
#include "qmarg/rng.hpp"

namespace qmarg::selfcheck {

namespace {

constexpr double kOracleTol = 1e-9;
constexpr double kIdentityTol = 1e-10;
constexpr double kClosedFormTol = 1e-12;

std::vector<int> iota_modes(std::size_t begin, std::size_t count) {
    std::vector<int> modes(count);
    std::iota(modes.begin(), modes.end(), static_cast<int>(begin));
    return modes;
}

std::vector<int> random_rows(SplitMix64& rng, std::size_t size, std::size_t n_modes) {
    std::vector<int> rows(size);
    for (auto& r : rows) r = static_cast<int>(rng() % n_modes);
    return rows;
}

std::vector<int> random_distinct_rows(SplitMix64& rng, std::size_t size, std::size_t n_modes) {
    std::vector<int> all = iota_modes(0, n_modes);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(size);
    return all;
}

double max_abs_diff(const std::map<std::vector<int>, double>& a, const std::map<std::vector<int>, double>& b) {
    double worst = 0.0;
    for (const auto& [k, v] : a) {
        auto it = b.find(k);
        worst = std::max(worst, std::abs(v - (it == b.end() ? 0.0 : it->second)));
    }
    for (const auto& [k, v] : b) {
        if (!a.contains(k)) worst = std::max(worst, std::abs(v));
    }
    return worst;
}

CheckResult make(std::string name, double residual, double tol, std::string detail = {}) {
    const bool ok = std::isfinite(residual) && residual <= tol;
    return CheckResult{std::move(name), ok, residual, tol, std::move(detail)};
}

} // namespace

Grid grid_for(Scale scale) {
    if (scale == Scale::medium) return Grid{{4, 6, 8}, {2, 3, 4}, {0.0, 0.3, 0.7, 1.0}};
    return Grid{{4, 6}, {2, 3}, {0.0, 0.3, 0.7, 1.0}};
}

std::optional<InputState> grid_state(const std::string& family, std::size_t n_modes, std::size_t n) {
    if (family == "fock") {
        if (n > n_modes) return std::nullopt;
        return fock_state(n_modes, iota_modes(0, n));
    }
    if (family == "gbs") {
        if (n % 2 != 0 || n_modes < 4) return std::nullopt;
        return gbs_state(n_modes, GBSSpec{{{0, 1}, {2, 3}}, {0.6, 0.9}, {0.3, 1.1}}, n);
    }
    if (family == "superposition") {
        if (2 * n > n_modes) return std::nullopt;
        return disjoint_superposition(n_modes, iota_modes(0, n), iota_modes(n, n));
    }
    throw InvalidQueryError("unknown grid family '" + family + "'");
}

GridOutcome run_grid(const Grid& grid, std::size_t workers) {
    struct Cell {
        std::size_t n_modes, n;
        std::string family;
    };
    std::vector<Cell> cells;
    GridOutcome out;
    for (std::size_t n_modes : grid.modes)
        for (std::size_t n : grid.photons)
            for (const char* family : {"fock", "gbs", "superposition"}) {
                if (grid_state(family, n_modes, n)) cells.push_back({n_modes, n, family});
                else out.skipped += grid.overlaps.size();
            }

    struct CellResult {
        double marginal = 0.0;
        double normalization = 0.0;
    };
    std::vector<CellResult> results(cells.size());
    parallel_for(cells.size(), workers, [&](std::size_t i) {
        const Cell& c = cells[i];
        const auto u = Interferometer::haar_random(c.n_modes, 1000 + c.n_modes);
        const auto state = *grid_state(c.family, c.n_modes, c.n);
        for (double x : grid.overlaps) {
            const auto d = oracle::full_distribution(u, state, x);
            results[i].normalization = std::max(results[i].normalization, std::abs(d.total() - 1.0));
            for (std::size_t k = 1; k <= c.n; ++k) {
                for (const auto& [pattern, p] : marginal_distribution(u, state, k, x)) {
                    results[i].marginal = std::max(results[i].marginal, std::abs(p - oracle::marginalize(d, pattern)));
                }
            }
        }
    });

    double worst = -1.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out.marginal_residual = std::max(out.marginal_residual, results[i].marginal);
        out.normalization_residual = std::max(out.normalization_residual, results[i].normalization);
        if (results[i].marginal > worst) {
            worst = results[i].marginal;
            out.worst_cell = cells[i].family + " N=" + std::to_string(cells[i].n_modes) + " n=" + std::to_string(cells[i].n);
        }
    }
    out.cells = cells.size() * grid.overlaps.size();
    return out;
}

double product_expansion_residual(std::size_t trials, std::size_t max_size, std::uint64_t seed) {
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        SplitMix64 rng = SplitMix64::stream(seed, t);
        const std::size_t n_modes = 2 + rng() % 5;
        const std::size_t size = 1 + rng() % max_size;
        const auto u = Interferometer::haar_random(n_modes, rng());
        const auto xi = random_rows(rng, size, n_modes);
        const auto chi = random_rows(rng, size, n_modes);
        const auto phi = random_rows(rng, size, n_modes);
        const auto m_xi = submatrix(u, xi, phi);
        const Complex lhs = permanent(m_xi) * std::conj(permanent(submatrix(u, chi, phi)));

        std::vector<int> order = iota_modes(0, size);
        Complex rhs = 0.0;
        do {
            std::vector<int> permuted(size);
            for (std::size_t i = 0; i < size; ++i) permuted[i] = chi[order[i]];
            rhs += hadamard_conj_permanent(m_xi, submatrix(u, permuted, phi));
        } while (std::next_permutation(order.begin(), order.end()));
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
    return worst;
}

double orthonormality_residual(std::size_t trials, std::size_t max_size, std::uint64_t seed) {
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        SplitMix64 rng = SplitMix64::stream(seed, t);
        const std::size_t size = 1 + rng() % max_size;
        const std::size_t n_modes = size + rng() % 3;
        const auto u = Interferometer::haar_random(n_modes, rng());
        const auto a = random_distinct_rows(rng, size, n_modes);
        // every other trial compares a list with itself
        const auto b = t % 2 == 0 ? a : random_distinct_rows(rng, size, n_modes);

        double expected = a == b ? 1.0 : 0.0;
        for (std::size_t i = 2; i <= size; ++i) expected *= static_cast<double>(i);

        Complex sum = 0.0;
        std::vector<int> phi(size, 0);
        while (true) {
            sum += hadamard_conj_permanent(submatrix(u, a, phi), submatrix(u, b, phi));
            std::size_t pos = 0;
            while (pos < size && ++phi[pos] == static_cast<int>(n_modes)) phi[pos++] = 0;
            if (pos == size) break;
        }
        worst = std::max(worst, std::abs(sum - expected));
    }
    return worst;
}

double gbs_closed_form_residual(std::uint64_t seed) {
    double worst = 0.0;
    for (std::size_t sources = 1; sources <= 3; ++sources) {
        const std::size_t n_modes = 2 * sources + 2;
        GBSSpec spec;
        for (std::size_t s = 0; s < sources; ++s) {
            spec.pairs.emplace_back(2 * s, 2 * s + 1);
            spec.r.push_back(0.7);
            spec.phi.push_back(0.4 * static_cast<double>(s));
        }
        const auto u = Interferometer::haar_random(n_modes, seed + sources);
        const auto closed = gbs_first_order_marginal(u, spec);
        for (std::size_t n = 2; n <= 4; n += 2) {
            const auto table = marginal_distribution(u, gbs_state(n_modes, spec, n), 1, 1.0);
            for (std::size_t c = 0; c < n_modes; ++c) {
                worst = std::max(worst, std::abs(table.at({static_cast<int>(c)}) - closed[c]));
            }
        }
    }
    return worst;
}

double hom_residual() {
    const double h = 1.0 / std::sqrt(2.0);
    const Interferometer bs(ComplexMatrix{{h, h}, {h, -h}});
    const auto state = fock_state(2, std::vector<int>{0, 1});
    double worst = 0.0;
    for (double x : {0.0, 0.5, 1.0}) {
        const double expected = (1.0 - x * x) / 2.0;
        const MarginalQuery q{OutputPattern{{0, 1}, false}, Distinguishability(x), std::nullopt};
        worst = std::max(worst, std::abs(marginal_probability(bs, state, q) - expected));
        worst = std::max(worst, std::abs(oracle::full_distribution(bs, state, x).at({0, 1}) - expected));
    }
    return worst;
}

std::vector<CheckResult> check_fixtures(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<CheckResult> out;
    io::Json manifest;
    try {
        manifest = io::read_json_file((fs::path(dir) / "manifest.json").string());
        if (!manifest.contains("cases") || !manifest["cases"].is_array()) {
            throw ParseError("manifest field 'cases' must be an array");
        }
    } catch (const Error& e) {
        out.push_back(CheckResult{"fixture:manifest", false, 0.0, 0.0, e.what()});
        return out;
    }
    for (const auto& entry : manifest["cases"]) {
        const std::string name = "fixture:" + entry.value("name", std::string("unnamed"));
        try {
            const auto path = [&](const char* field) {
                if (!entry.contains(field) || !entry[field].is_string()) {
                    throw ParseError(std::string("manifest field '") + field + "' must be a file name");
                }
                return (fs::path(dir) / entry[field].get<std::string>()).string();
            };
            const auto u = io::interferometer_from_json(io::read_json_file(path("unitary")));
            const auto state = io::state_spec_from_json(io::read_json_file(path("state"))).build(u.n_modes());
            const auto stored = io::distribution_from_json(io::read_json_file(path("dump")));
            const double x = entry.at("x").get<double>();

            const auto fresh = oracle::full_distribution(u, state, x);
            double residual = max_abs_diff(fresh.entries, stored.entries);
            residual = std::max(residual, std::abs(stored.total() - 1.0));
            for (std::size_t k = 1; k <= std::min<std::size_t>(2, state.photon_number()); ++k) {
                for (const auto& [pattern, p] : marginal_distribution(u, state, k, x)) {
                    residual = std::max(residual, std::abs(p - oracle::marginalize(stored, pattern)));
                }
            }
            out.push_back(make(name, residual, kOracleTol));
        } catch (const std::exception& e) {
            out.push_back(CheckResult{name, false, 0.0, kOracleTol, e.what()});
        }
    }
    return out;
}

std::vector<CheckResult> run(Scale scale, const std::string& fixture_dir, std::size_t workers) {
    std::vector<CheckResult> out;
    const auto grid = run_grid(grid_for(scale), workers);
    const std::string cells = std::to_string(grid.cells) + " cells, " + std::to_string(grid.skipped) + " skipped";
    out.push_back(make("oracle_equivalence", grid.marginal_residual, kOracleTol, cells + "; worst " + grid.worst_cell));
    out.push_back(make("normalization", grid.normalization_residual, kOracleTol, cells));

    const std::size_t trials = scale == Scale::medium ? 50 : 10;
    out.push_back(make("product_expansion", product_expansion_residual(trials, 5, 11), kIdentityTol,
                       std::to_string(trials) + " unitaries"));
    out.push_back(make("orthonormality", orthonormality_residual(trials, 4, 12), kIdentityTol,
                       std::to_string(trials) + " unitaries"));
    out.push_back(make("gbs_first_order", gbs_closed_form_residual(13), kClosedFormTol));
    out.push_back(make("hong_ou_mandel", hom_residual(), kClosedFormTol));

    for (auto& r : check_fixtures(fixture_dir)) out.push_back(std::move(r));
    return out;
}

} // namespace qmarg::selfcheck
