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

#include "qmarg/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "qmarg/enumerate.hpp"
#include "qmarg/errors.hpp"
#include "qmarg/parallel.hpp"

namespace qmarg {

namespace {

double factorial(std::size_t n) noexcept {
    double out = 1.0;
    for (std::size_t i = 2; i <= n; ++i) out *= static_cast<double>(i);
    return out;
}

// (mode, count) pairs of a sorted mode list.
std::vector<std::pair<int, int>> occupation_pairs(std::span<const int> sorted_modes) {
    std::vector<std::pair<int, int>> out;
    for (int m : sorted_modes) {
        if (!out.empty() && out.back().first == m) ++out.back().second;
        else out.emplace_back(m, 1);
    }
    return out;
}

int count_of(const std::vector<std::pair<int, int>>& occ, int mode) {
    for (auto [m, c] : occ)
        if (m == mode) return c;
    return 0;
}

using PlanKey = std::pair<std::vector<int>, std::vector<int>>;

struct PlanBuilder {
    std::size_t k;
    double x;
    std::size_t j_cap;
    std::size_t max_terms;
    std::map<PlanKey, std::pair<Complex, int>> accumulated;

    void add_pair(const AmplitudeTerm& ket, const AmplitudeTerm& bra) {
        const auto ket_occ = occupation_pairs(ket.xi.modes());
        const auto bra_occ = occupation_pairs(bra.xi.modes());
        const Complex coef = ket.amplitude * std::conj(bra.amplitude) * static_cast<double>(multiplicity(bra.xi));

        std::vector<int> kept_counts(ket_occ.size(), 0);
        choose_kept(ket_occ, bra_occ, kept_counts, 0, k, coef);
    }

    // Picks how many photons of each occupied ket mode are retained (sum k).
    void choose_kept(const std::vector<std::pair<int, int>>& ket_occ, const std::vector<std::pair<int, int>>& bra_occ,
                     std::vector<int>& kept_counts, std::size_t idx, std::size_t remaining, Complex coef) {
        if (idx == ket_occ.size()) {
            if (remaining == 0) emit_subset(ket_occ, bra_occ, kept_counts, coef);
            return;
        }
        const int available = ket_occ[idx].second;
        for (int s = 0; s <= available && static_cast<std::size_t>(s) <= remaining; ++s) {
            kept_counts[idx] = s;
            choose_kept(ket_occ, bra_occ, kept_counts, idx + 1, remaining - s, coef);
        }
        kept_counts[idx] = 0;
    }

    void emit_subset(const std::vector<std::pair<int, int>>& ket_occ, const std::vector<std::pair<int, int>>& bra_occ,
                     const std::vector<int>& kept_counts, Complex coef) {
        // Marginalized photons R = ket - S must be matched one-to-one in the bra.
        std::vector<std::pair<int, int>> leftover = bra_occ;
        double ways = 1.0;
        std::vector<int> kept;
        for (std::size_t i = 0; i < ket_occ.size(); ++i) {
            const auto [mode, count] = ket_occ[i];
            const int dropped = count - kept_counts[i];
            if (count_of(bra_occ, mode) < dropped) return;
            for (auto& [m, c] : leftover)
                if (m == mode) c -= dropped;
            ways *= binomial(static_cast<std::size_t>(count), static_cast<std::size_t>(kept_counts[i]));
            kept.insert(kept.end(), kept_counts[i], mode);
        }
        std::erase_if(leftover, [](const auto& p) { return p.second == 0; });

        std::vector<int> arrangement(k);
        arrange(kept, leftover, arrangement, 0, 0, coef * ways);
    }

    // Distinct arrangements of the leftover bra multiset against the kept ket list.
    void arrange(const std::vector<int>& kept, std::vector<std::pair<int, int>>& leftover, std::vector<int>& arrangement,
                 std::size_t pos, std::size_t mismatches, Complex weight) {
        if (pos == k) {
            const Complex w = weight * std::pow(x, static_cast<double>(mismatches));
            if (w == Complex(0.0)) return;
            auto [it, inserted] = accumulated.try_emplace(PlanKey{kept, arrangement}, w, static_cast<int>(mismatches));
            if (!inserted) it->second.first += w;
            if (accumulated.size() > max_terms) {
                throw EnumerationLimitError("marginal plan exceeds " + std::to_string(max_terms) + " terms");
            }
            return;
        }
        for (auto& [mode, count] : leftover) {
            if (count == 0) continue;
            const std::size_t next = mismatches + (mode != kept[pos] ? 1 : 0);
            if (next > j_cap) continue;
            --count;
            arrangement[pos] = mode;
            arrange(kept, leftover, arrangement, pos + 1, next, weight);
            ++count;
        }
    }
};

Complex product_entry(const Interferometer& u, int ket_row, int bra_row, int col) {
    return u(ket_row, col) * std::conj(u(bra_row, col));
}

void check_compatible(const Interferometer& u, const InputState& state) {
    if (u.n_modes() != state.n_modes()) {
        throw InvalidQueryError("interferometer has " + std::to_string(u.n_modes()) + " modes, state has " +
                                std::to_string(state.n_modes()));
    }
}

void check_query(const Interferometer& u, const InputState& state, const MarginalQuery& q) {
    check_compatible(u, state);
    const auto& modes = q.pattern.modes;
    const std::size_t k = modes.size();
    if (k == 0) throw InvalidQueryError("pattern must name at least one mode");
    if (k > state.photon_number()) {
        throw InvalidQueryError("pattern has " + std::to_string(k) + " modes but the state carries " +
                                std::to_string(state.photon_number()) + " photons");
    }
    for (int m : modes) {
        if (m < 0 || static_cast<std::size_t>(m) >= u.n_modes()) {
            throw BoundsError("output mode " + std::to_string(m) + " outside [0, " + std::to_string(u.n_modes()) + ")");
        }
    }
    if (std::set<int>(modes.begin(), modes.end()).size() != k) {
        throw InvalidQueryError("repeated output modes are not supported by exact marginal queries");
    }
    if (q.j_max && *q.j_max > k) throw InvalidQueryError("j_max must not exceed the pattern size");
}

double checked_real(Complex value) {
    if (std::abs(value.imag()) > kRealnessTol) {
        throw ConsistencyError("marginal has imaginary residual " + std::to_string(value.imag()));
    }
    return value.real();
}

double evaluate_query(const Interferometer& u, const InputState& state, const MarginalQuery& q) {
    check_query(u, state, q);
    const std::size_t k = q.pattern.size();
    const MarginalPlan plan(state, k, q.distinguishability.x(), q.j_max, q.max_plan_terms);
    const double ordered = checked_real(plan.evaluate_ordered(u, q.pattern.modes));
    return q.pattern.ordered ? ordered : ordered * factorial(k);
}

} // namespace

MarginalPlan::MarginalPlan(const InputState& state, std::size_t k, double x, std::optional<std::size_t> j_max,
                           std::size_t max_terms)
    : n_(state.photon_number()), k_(k) {
    if (k > n_) throw InvalidQueryError("marginal order exceeds photon number");
    (void)Distinguishability{x};
    const std::size_t j_cap = j_max ? std::min(*j_max, k) : k;
    prefactor_ = factorial(n_ - k) / factorial(n_);

    PlanBuilder builder{k, x, j_cap, max_terms, {}};
    for (const auto& ket : state.terms())
        for (const auto& bra : state.terms()) builder.add_pair(ket, bra);

    terms_.reserve(builder.accumulated.size());
    for (auto& [key, value] : builder.accumulated) {
        if (value.first == Complex(0.0)) continue;
        terms_.push_back({key.first, key.second, value.first, value.second});
    }
}

Complex MarginalPlan::evaluate_ordered(const Interferometer& u, std::span<const int> modes) const {
    if (modes.size() != k_) throw InvalidQueryError("pattern length does not match the plan order");
    Complex total = 0.0;
    ComplexMatrix a(k_, k_);
    for (const auto& t : terms_) {
        for (std::size_t r = 0; r < k_; ++r)
            for (std::size_t c = 0; c < k_; ++c) a(r, c) = product_entry(u, t.ket_rows[r], t.bra_rows[r], modes[c]);
        total += t.weight * permanent(a);
    }
    return prefactor_ * total;
}

std::vector<Complex> MarginalPlan::evaluate_extensions(const Interferometer& u, std::span<const int> prefix) const {
    if (k_ == 0 || prefix.size() + 1 != k_) throw InvalidQueryError("prefix length must be plan order - 1");
    const std::size_t n_modes = u.n_modes();
    std::vector<Complex> out(n_modes, Complex(0.0));
    const std::size_t m = k_ - 1;
    ComplexMatrix minor(m, m);
    std::vector<Complex> minors(k_);

    for (const auto& t : terms_) {
        for (std::size_t skip = 0; skip < k_; ++skip) {
            std::size_t rr = 0;
            for (std::size_t r = 0; r < k_; ++r) {
                if (r == skip) continue;
                for (std::size_t c = 0; c < m; ++c) minor(rr, c) = product_entry(u, t.ket_rows[r], t.bra_rows[r], prefix[c]);
                ++rr;
            }
            minors[skip] = t.weight * permanent(minor);
        }
        for (std::size_t o = 0; o < n_modes; ++o) {
            Complex acc = 0.0;
            for (std::size_t r = 0; r < k_; ++r)
                acc += product_entry(u, t.ket_rows[r], t.bra_rows[r], static_cast<int>(o)) * minors[r];
            out[o] += acc;
        }
    }
    for (auto& v : out) v *= prefactor_;
    return out;
}

double marginal_probability(const Interferometer& u, const InputState& state, const MarginalQuery& q) {
    MarginalQuery exact = q;
    exact.j_max.reset();
    return evaluate_query(u, state, exact);
}

double truncated_marginal(const Interferometer& u, const InputState& state, const MarginalQuery& q) {
    return evaluate_query(u, state, q);
}

std::map<std::vector<int>, double> marginal_distribution(const Interferometer& u, const InputState& state,
                                                         std::size_t k, double x, std::optional<std::size_t> j_max,
                                                         const DistributionOptions& options) {
    check_compatible(u, state);
    if (k == 0 || k > state.photon_number()) throw InvalidQueryError("marginal order must lie in [1, n]");
    if (j_max && *j_max > k) throw InvalidQueryError("j_max must not exceed the marginal order");
    const std::size_t n_modes = u.n_modes();
    if (binomial(n_modes, k) > static_cast<double>(options.max_patterns)) {
        throw EnumerationLimitError("C(" + std::to_string(n_modes) + ", " + std::to_string(k) +
                                    ") patterns exceed the limit " + std::to_string(options.max_patterns));
    }

    std::vector<std::vector<int>> patterns;
    enumerate_rho(n_modes, k, [&](std::span<const int> subset, std::span<const int>) {
        patterns.emplace_back(subset.begin(), subset.end());
    });

    const MarginalPlan plan(state, k, x, j_max, options.max_plan_terms);
    const double to_unordered = factorial(k);
    std::vector<double> values(patterns.size());
    parallel_for(patterns.size(), options.workers, [&](std::size_t i) {
        values[i] = checked_real(plan.evaluate_ordered(u, patterns[i])) * to_unordered;
    });

    std::map<std::vector<int>, double> table;
    for (std::size_t i = 0; i < patterns.size(); ++i) table.emplace(std::move(patterns[i]), values[i]);
    return table;
}

std::vector<double> gbs_first_order_marginal(const Interferometer& u, const GBSSpec& spec) {
    if (spec.pairs.empty()) throw InvalidStateError("GBS spec needs at least one squeezer");
    for (double r : spec.r) {
        if (std::abs(r - spec.r.front()) > 1e-12) {
            throw InvalidQueryError("closed-form first-order marginal needs equal squeezing");
        }
    }
    std::vector<int> squeezed;
    for (auto [a, b] : spec.pairs) {
        squeezed.push_back(a);
        squeezed.push_back(b);
    }
    for (int m : squeezed) {
        if (m < 0 || static_cast<std::size_t>(m) >= u.n_modes()) throw BoundsError("squeezer mode out of range");
    }
    std::vector<double> out(u.n_modes(), 0.0);
    for (std::size_t c = 0; c < u.n_modes(); ++c) {
        for (int j : squeezed) out[c] += std::norm(u(j, c));
        out[c] /= static_cast<double>(squeezed.size());
    }
    return out;
}

namespace detail {

double marginal_probability_literal(const Interferometer& u, const InputState& state, std::span<const int> modes,
                                    double x, std::optional<std::size_t> j_max, bool moved_inside_rho) {
    check_compatible(u, state);
    const std::size_t n = state.photon_number();
    const std::size_t k = modes.size();
    if (k > n) throw InvalidQueryError("pattern larger than photon number");
    const std::size_t cap = j_max.value_or(n);
    const auto sigmas = collect_sigma(n, n);

    Complex total = 0.0;
    for (const auto& ket : state.terms()) {
        const auto xi = ket.xi.modes();
        for (const auto& bra : state.terms()) {
            const auto chi = bra.xi.modes();
            for (const auto& perm : sigmas) {
                std::vector<int> permuted(n);
                std::size_t mismatches = 0;
                for (std::size_t p = 0; p < n; ++p) {
                    permuted[p] = chi[perm.sigma[p]];
                    if (permuted[p] != xi[p]) ++mismatches;
                }
                if (mismatches > cap) continue;
                const Complex weight = ket.amplitude * std::conj(bra.amplitude) * std::pow(x, static_cast<double>(mismatches));

                enumerate_rho(n, k, [&](std::span<const int> rho, std::span<const int> rho_bar) {
                    for (int p : rho_bar) {
                        if (xi[p] != permuted[p]) return;
                        if (moved_inside_rho && perm.sigma[p] != p) return;
                    }
                    std::vector<int> ket_rows, bra_rows;
                    for (int p : rho) {
                        ket_rows.push_back(xi[p]);
                        bra_rows.push_back(permuted[p]);
                    }
                    total += weight * hadamard_conj_permanent(submatrix(u, ket_rows, modes), submatrix(u, bra_rows, modes));
                });
            }
        }
    }
    return checked_real(total / binomial(n, k));
}

} // namespace detail

} // namespace qmarg
