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

#include "qmarg/enumerate.hpp"

#include <algorithm>
#include <numeric>

#include "qmarg/errors.hpp"

namespace qmarg {

std::uint64_t derangements(std::size_t j) noexcept {
    // D_j = (j - 1)(D_{j-1} + D_{j-2}), D_0 = 1, D_1 = 0
    std::uint64_t prev2 = 1, prev1 = 0;
    if (j == 0) return 1;
    for (std::size_t i = 2; i <= j; ++i) {
        const std::uint64_t next = (i - 1) * (prev1 + prev2);
        prev2 = prev1;
        prev1 = next;
    }
    return prev1;
}

namespace {

struct DerangementWalker {
    std::span<const int> moved;
    std::vector<bool> taken;
    PermutationClass& current;
    const std::function<void(const PermutationClass&)>& visit;

    void walk(std::size_t pos) {
        if (pos == moved.size()) {
            visit(current);
            return;
        }
        for (std::size_t t = 0; t < moved.size(); ++t) {
            if (taken[t] || t == pos) continue;
            taken[t] = true;
            current.sigma[moved[pos]] = moved[t];
            walk(pos + 1);
            taken[t] = false;
        }
        current.sigma[moved[pos]] = moved[pos];
    }
};

} // namespace

void enumerate_sigma(std::size_t n, std::size_t j_max, const std::function<void(const PermutationClass&)>& visit) {
    if (j_max > n) throw InvalidQueryError("j_max exceeds permutation size");
    PermutationClass current;
    current.sigma.resize(n);
    std::iota(current.sigma.begin(), current.sigma.end(), 0);

    for (std::size_t j = 0; j <= j_max; ++j) {
        if (j == 1) continue;
        current.non_fixed_count = static_cast<int>(j);
        enumerate_rho(n, j, [&](std::span<const int> moved, std::span<const int>) {
            DerangementWalker walker{moved, std::vector<bool>(moved.size(), false), current, visit};
            walker.walk(0);
        });
    }
}

std::vector<PermutationClass> collect_sigma(std::size_t n, std::size_t j_max) {
    std::vector<PermutationClass> out;
    enumerate_sigma(n, j_max, [&](const PermutationClass& p) { out.push_back(p); });
    return out;
}

void enumerate_rho(std::size_t n, std::size_t k,
                   const std::function<void(std::span<const int>, std::span<const int>)>& visit) {
    if (k > n) throw InvalidQueryError("subset size exceeds set size");
    std::vector<int> subset(k);
    std::iota(subset.begin(), subset.end(), 0);
    std::vector<int> complement;
    complement.reserve(n - k);

    while (true) {
        complement.clear();
        std::size_t s = 0;
        for (int i = 0; i < static_cast<int>(n); ++i) {
            if (s < k && subset[s] == i) ++s;
            else complement.push_back(i);
        }
        visit(subset, complement);

        // advance to the next combination
        std::size_t i = k;
        while (i > 0 && subset[i - 1] == static_cast<int>(n - k + i - 1)) --i;
        if (i == 0) return;
        ++subset[i - 1];
        for (std::size_t t = i; t < k; ++t) subset[t] = subset[t - 1] + 1;
    }
}

} // namespace qmarg
