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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace qmarg {

/// A permutation of {0..n-1} with the number of positions it moves.
struct PermutationClass {
    std::vector<int> sigma;
    int non_fixed_count = 0;
};

/// Number of derangements D_j (permutations of j elements without fixed points).
std::uint64_t derangements(std::size_t j) noexcept;

/// Calls `visit` once for every permutation of n elements moving at most
/// j_max positions, grouped by increasing non-fixed count. There are
/// C(n, j) D_j permutations with exactly j moved positions.
void enumerate_sigma(std::size_t n, std::size_t j_max, const std::function<void(const PermutationClass&)>& visit);

std::vector<PermutationClass> collect_sigma(std::size_t n, std::size_t j_max);

/// Calls `visit(subset, complement)` for each k-subset of {0..n-1} in
/// lexicographic order; both spans are sorted.
void enumerate_rho(std::size_t n, std::size_t k,
                   const std::function<void(std::span<const int>, std::span<const int>)>& visit);

} // namespace qmarg
