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


#pragma once

// Oracle-equivalence and identity checks, shared by the CLI `selfcheck`
// command and the acceptance harness.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmarg/permanent.hpp"
#include "qmarg/states.hpp"

namespace qmarg::selfcheck {

enum class Scale { small, medium };

struct CheckResult {
    std::string name;
    bool passed = false;
    double residual = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

/// Mode counts, photon numbers and overlaps to sweep. Every cell runs the
/// Fock, two-squeezer GBS and disjoint-superposition families where the
/// family fits (GBS needs even n and N >= 4, the superposition needs 2n <= N).
struct Grid {
    std::vector<std::size_t> modes;
    std::vector<std::size_t> photons;
    std::vector<double> overlaps;
};

Grid grid_for(Scale scale);

/// Grid state by family name: "fock", "gbs" or "superposition".
std::optional<InputState> grid_state(const std::string& family, std::size_t n_modes, std::size_t n);

struct GridOutcome {
    double marginal_residual = 0.0;      ///< max |marginal - oracle marginalization|
    double normalization_residual = 0.0; ///< max |sum of full distribution - 1|
    std::size_t cells = 0;
    std::size_t skipped = 0;
    std::string worst_cell;
};

GridOutcome run_grid(const Grid& grid, std::size_t workers = 1);

/// Max |Perm(A) conj Perm(B) - sum_sigma Perm(A o conj B_sigma)| relative to max(1, |lhs|)
/// over random row and column lists of size <= max_size.
double product_expansion_residual(std::size_t trials, std::size_t max_size, std::uint64_t seed);

/// Max |sum over ordered output tuples of Perm(M_a o conj M_b) - m! delta(a, b)|
/// over random distinct row lists of size <= max_size.
double orthonormality_residual(std::size_t trials, std::size_t max_size, std::uint64_t seed);

/// Equal-squeezing GBS first-order marginal against its closed form.
double gbs_closed_form_residual(std::uint64_t seed);

/// Hong-Ou-Mandel coincidence against (1 - x^2)/2 for x in {0, 0.5, 1}.
double hom_residual();

/// Recomputes every case listed in <dir>/manifest.json and compares with its stored dump.
std::vector<CheckResult> check_fixtures(const std::string& dir);

std::vector<CheckResult> run(Scale scale, const std::string& fixture_dir, std::size_t workers = 1);

} // namespace qmarg::selfcheck
