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

#include "qmarg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "qmarg/errors.hpp"

namespace qmarg::oracle {

namespace {

std::vector<std::vector<int>> all_permutations(std::size_t n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

// Sorted n-element multisets over {0..N-1}.
std::vector<std::vector<int>> all_multisets(std::size_t n_modes, std::size_t n, std::size_t max_patterns) {
    double count = 1.0;
    for (std::size_t i = 1; i <= n; ++i) count = count * static_cast<double>(n_modes + n - i) / static_cast<double>(i);
    if (count > static_cast<double>(max_patterns)) {
        throw EnumerationLimitError("oracle would enumerate " + std::to_string(static_cast<long long>(count)) +
                                    " output patterns, limit " + std::to_string(max_patterns));
    }
    std::vector<std::vector<int>> out;
    std::vector<int> current(n, 0);
    if (n == 0) return {current};
    if (n_modes == 0) return out;
    while (true) {
        out.push_back(current);
        std::size_t i = n;
        while (i > 0 && current[i - 1] == static_cast<int>(n_modes) - 1) --i;
        if (i == 0) break;
        const int next = current[i - 1] + 1;
        for (std::size_t t = i - 1; t < n; ++t) current[t] = next;
    }
    return out;
}

double occupation_factorials(const std::vector<int>& sorted) {
    double mu = 1.0;
    std::size_t run = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        run = (i > 0 && sorted[i] == sorted[i - 1]) ? run + 1 : 1;
        mu *= static_cast<double>(run);
    }
    return mu;
}

void check_modes(const Interferometer& u, const InputState& state) {
    if (u.n_modes() != state.n_modes()) throw InvalidQueryError("interferometer and state mode counts differ");
}

double clamp_probability(Complex value, const std::vector<int>& pattern) {
    if (std::abs(value.imag()) > 1e-10) {
        throw ConsistencyError("oracle probability not real for pattern of size " + std::to_string(pattern.size()));
    }
    return value.real() < 0.0 && value.real() >= -1e-12 ? 0.0 : value.real();
}

} // namespace

double FullDistribution::total() const {
    double sum = 0.0;
    for (const auto& [pattern, p] : entries) sum += p;
    return sum;
}

double FullDistribution::at(const std::vector<int>& sorted_modes) const {
    const auto it = entries.find(sorted_modes);
    return it == entries.end() ? 0.0 : it->second;
}

FullDistribution full_distribution(const Interferometer& u, const InputState& state, double x,
                                   std::size_t max_patterns) {
    check_modes(u, state);
    (void)Distinguishability{x};
    const std::size_t n = state.photon_number();
    const auto perms = all_permutations(n);
    const auto patterns = all_multisets(u.n_modes(), n, max_patterns);

    FullDistribution d{u.n_modes(), n, {}};
    for (const auto& phi : patterns) {
        Complex total = 0.0;
        for (const auto& ket : state.terms()) {
            const auto xi = ket.xi.modes();
            for (const auto& bra : state.terms()) {
                const auto chi = bra.xi.modes();
                Complex pair_sum = 0.0;
                for (const auto& sigma : perms) {
                    for (const auto& tau : perms) {
                        Complex prod = 1.0;
                        for (std::size_t i = 0; i < n; ++i) {
                            const int in_ket = xi[sigma[i]];
                            const int in_bra = chi[tau[i]];
                            prod *= u(in_ket, phi[i]) * std::conj(u(in_bra, phi[i]));
                            if (in_ket != in_bra) prod *= x;
                        }
                        pair_sum += prod;
                    }
                }
                total += ket.amplitude * std::conj(bra.amplitude) * pair_sum;
            }
        }
        d.entries.emplace(phi, clamp_probability(total / occupation_factorials(phi), phi));
    }
    return d;
}

FullDistribution classical_distribution(const Interferometer& u, const InputState& state, std::size_t max_patterns) {
    check_modes(u, state);
    const std::size_t n = state.photon_number();
    const std::size_t n_modes = u.n_modes();
    FullDistribution d{n_modes, n, {}};
    for (const auto& pattern : all_multisets(n_modes, n, max_patterns)) d.entries.emplace(pattern, 0.0);

    // Walk every ordered routing (o_1..o_n) of the photons.
    for (const auto& term : state.terms()) {
        const double weight = std::norm(term.amplitude) * static_cast<double>(multiplicity(term.xi));
        const auto xi = term.xi.modes();
        std::vector<int> route(n, 0);
        while (true) {
            double p = weight;
            for (std::size_t i = 0; i < n; ++i) p *= std::norm(u(xi[i], route[i]));
            std::vector<int> key = route;
            std::sort(key.begin(), key.end());
            d.entries[key] += p;

            std::size_t i = 0;
            while (i < n && route[i] == static_cast<int>(n_modes) - 1) route[i++] = 0;
            if (i == n) break;
            ++route[i];
        }
    }
    return d;
}

double factorial_moment(const FullDistribution& d, std::span<const int> modes) {
    if (std::set<int>(modes.begin(), modes.end()).size() != modes.size()) {
        throw InvalidQueryError("marginalize needs distinct modes");
    }
    double total = 0.0;
    for (const auto& [pattern, p] : d.entries) {
        double ways = 1.0;
        for (int m : modes) ways *= static_cast<double>(std::count(pattern.begin(), pattern.end(), m));
        total += ways * p;
    }
    return total;
}

double marginalize(const FullDistribution& d, std::span<const int> modes) {
    if (modes.size() > d.photon_number) throw InvalidQueryError("pattern larger than photon number");
    double choose = 1.0;
    for (std::size_t i = 1; i <= modes.size(); ++i)
        choose = choose * static_cast<double>(d.photon_number - modes.size() + i) / static_cast<double>(i);
    return factorial_moment(d, modes) / choose;
}

double total_variation(const std::map<std::vector<int>, double>& p, const std::map<std::vector<int>, double>& q) {
    double sum = 0.0;
    for (const auto& [key, value] : p) {
        const auto it = q.find(key);
        sum += std::abs(value - (it == q.end() ? 0.0 : it->second));
    }
    for (const auto& [key, value] : q) {
        if (!p.contains(key)) sum += std::abs(value);
    }
    return 0.5 * sum;
}

} // namespace qmarg::oracle
