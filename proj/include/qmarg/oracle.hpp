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

// Brute-force references. Nothing here shares code with the marginal
// evaluator beyond the Interferometer/InputState containers: every output
// probability is a literal double sum over permutations, so agreement with
// MarginalPlan is an independent check.

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "qmarg/permanent.hpp"
#include "qmarg/states.hpp"

namespace qmarg::oracle {

/// Probability of every n-photon output multiset, collisions included.
/// Keys are sorted mode lists.
struct FullDistribution {
    std::size_t n_modes = 0;
    std::size_t photon_number = 0;
    std::map<std::vector<int>, double> entries;

    double total() const;
    double at(const std::vector<int>& sorted_modes) const;
};

inline constexpr std::size_t kMaxOraclePatterns = 200000;

/// P(phi) = 1/mu(phi) sum_{xi,chi} c_xi conj(c_chi) sum_{sigma,tau in S_n}
///          prod_i U[xi_sigma(i), phi_i] conj(U[chi_tau(i), phi_i]) g(xi_sigma(i), chi_tau(i))
/// with g(a, b) = 1 for equal input modes and x otherwise.
FullDistribution full_distribution(const Interferometer& u, const InputState& state, double x,
                                   std::size_t max_patterns = kMaxOraclePatterns);

/// Photons routed independently with probabilities |U[in, out]|^2, mixed
/// over input assignments with weights |c_xi|^2 mu(xi).
FullDistribution classical_distribution(const Interferometer& u, const InputState& state,
                                        std::size_t max_patterns = kMaxOraclePatterns);

/// E[prod_{s in modes} n_s]: expected number of ways to pick one detected
/// photon in each listed (distinct) mode. Sums to n over single modes.
double factorial_moment(const FullDistribution& d, std::span<const int> modes);

/// Probability that k photons drawn uniformly without replacement from the
/// detected ones occupy exactly the listed distinct modes:
/// factorial_moment / C(n, k). This is the unordered k-marginal.
double marginalize(const FullDistribution& d, std::span<const int> modes);

/// Total variation distance between two distributions over the same keys.
double total_variation(const std::map<std::vector<int>, double>& p, const std::map<std::vector<int>, double>& q);

} // namespace qmarg::oracle
