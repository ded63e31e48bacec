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

#include <gtest/gtest.h>

#include <cmath>

#include "qmarg/enumerate.hpp"
#include "qmarg/errors.hpp"
#include "qmarg/marginals.hpp"
#include "qmarg/oracle.hpp"
#include "test_support.hpp"

namespace qmarg {
namespace {

using testing::first_modes_fock;
using testing::split_superposition;
using testing::two_squeezers;

MarginalQuery query(std::vector<int> modes, double x, std::optional<std::size_t> j_max = std::nullopt) {
    return MarginalQuery{OutputPattern{std::move(modes)}, Distinguishability(x), j_max};
}

std::vector<std::vector<int>> subsets(std::size_t n, std::size_t k) {
    std::vector<std::vector<int>> out;
    enumerate_rho(n, k, [&](std::span<const int> s, std::span<const int>) { out.emplace_back(s.begin(), s.end()); });
    return out;
}

TEST(MarginalProbability, FullOrderIdealFockIsPermanentSquared) {
    const auto u = Interferometer::haar_random(6, 21);
    const auto state = first_modes_fock(6, 3);
    const std::vector<int> xi{0, 1, 2};
    for (const auto& phi : subsets(6, 3)) {
        const double expected = std::norm(permanent(submatrix(u, xi, phi)));
        EXPECT_NEAR(marginal_probability(u, state, query(phi, 1.0)), expected, 1e-12);
    }
}

TEST(MarginalProbability, FirstOrderGbsClosedForm) {
    const auto u = Interferometer::haar_random(8, 3);
    const GBSSpec spec{{{0, 1}, {2, 3}, {4, 5}}, {0.4, 0.4, 0.4}, {0.0, 0.7, 1.9}};
    const auto closed = gbs_first_order_marginal(u, spec);
    for (std::size_t n : {2u, 4u, 6u}) {
        const auto state = gbs_state(8, spec, n);
        for (int c = 0; c < 8; ++c) {
            EXPECT_NEAR(marginal_probability(u, state, query({c}, 1.0)), closed[c], 1e-12) << "n=" << n;
        }
    }
}

TEST(MarginalProbability, ClosedFormNeedsEqualSqueezing) {
    const auto u = Interferometer::haar_random(4, 3);
    EXPECT_THROW(gbs_first_order_marginal(u, two_squeezers()), InvalidQueryError);
}

TEST(MarginalProbability, OrderedPatternCarriesInverseFactorial) {
    const auto u = Interferometer::haar_random(6, 8);
    const auto state = first_modes_fock(6, 4);
    auto q = query({1, 4, 5}, 0.6);
    const double unordered = marginal_probability(u, state, q);
    q.pattern.ordered = true;
    EXPECT_NEAR(marginal_probability(u, state, q) * 6.0, unordered, 1e-15);
}

TEST(MarginalProbability, RejectsCollisionsAndOversizedPatterns) {
    const auto u = Interferometer::haar_random(4, 1);
    const auto state = first_modes_fock(4, 2);
    EXPECT_THROW(marginal_probability(u, state, query({1, 1}, 1.0)), InvalidQueryError);
    EXPECT_THROW(marginal_probability(u, state, query({0, 1, 2}, 1.0)), InvalidQueryError);
    EXPECT_THROW(marginal_probability(u, state, query({0, 4}, 1.0)), BoundsError);
    EXPECT_THROW(marginal_probability(u, first_modes_fock(5, 2), query({0}, 1.0)), InvalidQueryError);
    EXPECT_THROW(truncated_marginal(u, state, query({0}, 1.0, 2)), InvalidQueryError);
}

struct Case {
    const char* name;
    std::size_t n_modes;
    InputState state;
};

std::vector<Case> small_cases() {
    return {
        {"fock-3-of-6", 6, first_modes_fock(6, 3)},
        {"fock-4-of-6", 6, fock_state(6, std::vector<int>{0, 2, 3, 5})},
        {"gbs-2sq-n4", 6, gbs_state(6, two_squeezers(), 4)},
        {"superposition-2+2", 6, split_superposition(6, 2)},
        {"custom", 5,
         state_from_overlaps(5, std::vector<std::pair<FockVector, Complex>>{{FockVector({0, 0, 1}), Complex(0.6, 0.1)},
                                                                             {FockVector({0, 1, 2}), Complex(-0.3, 0.5)},
                                                                             {FockVector({1, 3, 3}), 0.4}})},
    };
}

// Direct marginalization of the brute-force full distribution is the oracle.
TEST(MarginalProbability, MatchesOracleMarginalization) {
    for (const auto& c : small_cases()) {
        const auto u = Interferometer::haar_random(c.n_modes, 77);
        for (double x : {0.0, 0.3, 0.7, 1.0}) {
            const auto full = oracle::full_distribution(u, c.state, x);
            for (std::size_t k = 1; k <= c.state.photon_number(); ++k) {
                for (const auto& phi : subsets(c.n_modes, k)) {
                    EXPECT_NEAR(marginal_probability(u, c.state, query(phi, x)), oracle::marginalize(full, phi), 1e-10)
                        << c.name << " x=" << x << " k=" << k;
                }
            }
        }
    }
}

TEST(MarginalProbability, LiteralSumAgreesIncludingTruncation) {
    for (const auto& c : small_cases()) {
        const auto u = Interferometer::haar_random(c.n_modes, 5);
        const std::size_t n = c.state.photon_number();
        for (double x : {0.3, 1.0}) {
            for (std::size_t k = 1; k <= n; ++k) {
                const auto phi = subsets(c.n_modes, k)[k % 3];
                for (std::size_t j = 0; j <= k; ++j) {
                    EXPECT_NEAR(truncated_marginal(u, c.state, query(phi, x, j)),
                                detail::marginal_probability_literal(u, c.state, phi, x, j), 1e-11)
                        << c.name << " k=" << k << " j_max=" << j;
                }
            }
        }
    }
}

// A permutation moving any marginalized photon contributes nothing, so
// restricting to permutations that only move retained photons is exact.
TEST(MarginalProbability, MovedPointsOutsideRhoContributeNothing) {
    const auto u = Interferometer::haar_random(8, 13);
    for (const auto& state : {first_modes_fock(8, 4), split_superposition(8, 3)}) {
        for (std::size_t k = 1; k <= state.photon_number(); ++k) {
            const std::vector<int> phi = subsets(8, k).back();
            for (double x : {0.5, 1.0}) {
                EXPECT_NEAR(detail::marginal_probability_literal(u, state, phi, x, std::nullopt, true),
                            marginal_probability(u, state, query(phi, x)), 1e-12);
            }
        }
    }
}

TEST(TruncatedMarginal, FullOrderEqualsExact) {
    const auto u = Interferometer::haar_random(6, 2);
    const auto state = gbs_state(6, two_squeezers(), 4);
    for (const auto& phi : subsets(6, 3)) {
        EXPECT_DOUBLE_EQ(truncated_marginal(u, state, query(phi, 0.8, 3)), marginal_probability(u, state, query(phi, 0.8)));
    }
}

TEST(TruncatedMarginal, ZeroOrderIsClassical) {
    const auto u = Interferometer::haar_random(6, 4);
    const auto state = first_modes_fock(6, 3);
    const auto classical = oracle::classical_distribution(u, state);
    const std::vector<int> xi{0, 1, 2};
    double collision_free_total = 0.0;
    for (const auto& phi : subsets(6, 3)) {
        const double value = truncated_marginal(u, state, query(phi, 1.0, 0));
        // permanent of the elementwise |U|^2 submatrix
        const auto m = submatrix(u, xi, phi);
        EXPECT_NEAR(value, hadamard_conj_permanent(m, m).real(), 1e-12);
        EXPECT_NEAR(value, classical.at(phi), 1e-12);
        collision_free_total += value;
    }
    double collision_weight = 0.0;
    for (const auto& [pattern, p] : classical.entries) {
        if (std::adjacent_find(pattern.begin(), pattern.end()) != pattern.end()) collision_weight += p;
    }
    EXPECT_NEAR(collision_free_total + collision_weight, 1.0, 1e-10);

    // in the expanded space, ordered tuples with repeats close the sum exactly
    const MarginalPlan plan(state, 3, 1.0, 0);
    double ordered_total = 0.0;
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b)
            for (int c = 0; c < 6; ++c) ordered_total += plan.evaluate_ordered(u, std::vector<int>{a, b, c}).real();
    EXPECT_NEAR(ordered_total, 1.0, 1e-10);
}

TEST(TruncatedMarginal, CanGoNegative) {
    // truncating ideal interference at order 2 is not a physical distribution
    const auto u = Interferometer::haar_random(6, 9);
    const auto state = first_modes_fock(6, 4);
    bool negative = false;
    for (const auto& phi : subsets(6, 4)) negative |= truncated_marginal(u, state, query(phi, 1.0, 2)) < 0.0;
    EXPECT_TRUE(negative);
}

TEST(MarginalPlan, ExtensionsMatchPointEvaluation) {
    const auto u = Interferometer::haar_random(5, 31);
    const auto state = gbs_state(5, two_squeezers(), 4);
    for (std::size_t k = 1; k <= 4; ++k) {
        const MarginalPlan plan(state, k, 0.6, k > 2 ? std::optional<std::size_t>(2) : std::nullopt);
        std::vector<int> prefix;
        for (std::size_t i = 0; i + 1 < k; ++i) prefix.push_back(static_cast<int>((3 * i + 1) % 5)); // includes repeats
        const auto ext = plan.evaluate_extensions(u, prefix);
        for (int c = 0; c < 5; ++c) {
            auto modes = prefix;
            modes.push_back(c);
            EXPECT_LT(std::abs(ext[c] - plan.evaluate_ordered(u, modes)), 1e-13);
        }
    }
}

TEST(MarginalPlan, OrderedMarginalsChainAcrossOrders) {
    // summing the last photon over all modes recovers the lower-order marginal
    const auto u = Interferometer::haar_random(5, 17);
    const auto state = gbs_state(5, two_squeezers(), 4);
    const MarginalPlan lower(state, 2, 0.4);
    const MarginalPlan upper(state, 3, 0.4);
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b) {
            const std::vector<int> prefix{a, b};
            Complex sum = 0.0;
            for (const auto& v : upper.evaluate_extensions(u, prefix)) sum += v;
            EXPECT_LT(std::abs(sum - lower.evaluate_ordered(u, prefix)), 1e-13);
        }
}

TEST(MarginalDistribution, FullOrderFockMatchesOracle) {
    const auto u = Interferometer::haar_random(6, 12);
    const auto state = first_modes_fock(6, 3);
    const auto full = oracle::full_distribution(u, state, 1.0);
    const auto table = marginal_distribution(u, state, 3, 1.0);
    EXPECT_EQ(table.size(), 20u);
    for (const auto& [pattern, p] : table) EXPECT_NEAR(p, full.at(pattern), 1e-12);
}

TEST(MarginalDistribution, FirstOrderGbsTable) {
    const auto u = Interferometer::haar_random(8, 14);
    const GBSSpec spec{{{0, 1}, {2, 3}}, {0.5, 0.5}, {0.2, 0.9}};
    const auto table = marginal_distribution(u, gbs_state(8, spec, 4), 1, 1.0);
    const auto closed = gbs_first_order_marginal(u, spec);
    double total = 0.0;
    for (const auto& [pattern, p] : table) {
        EXPECT_NEAR(p, closed[pattern[0]], 1e-12);
        total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(MarginalDistribution, DistinguishableTwoModeMarginals) {
    const auto u = Interferometer::haar_random(6, 15);
    const auto state = first_modes_fock(6, 3);
    const auto classical = oracle::classical_distribution(u, state);
    for (const auto& [pattern, p] : marginal_distribution(u, state, 2, 0.0)) {
        EXPECT_NEAR(p, oracle::marginalize(classical, pattern), 1e-12);
    }
}

TEST(MarginalDistribution, SumsToOneMinusCollisions) {
    const auto u = Interferometer::haar_random(6, 16);
    const auto state = gbs_state(6, two_squeezers(), 4);
    const auto full = oracle::full_distribution(u, state, 0.7);
    for (std::size_t k = 1; k <= 4; ++k) {
        double total = 0.0;
        for (const auto& [pattern, p] : marginal_distribution(u, state, k, 0.7)) total += p;
        // fraction of k-subsets of detected photons that sit in distinct modes
        double distinct = 0.0;
        for (const auto& [pattern, p] : full.entries) {
            std::vector<int> counts(6, 0);
            for (int m : pattern) ++counts[m];
            // elementary symmetric polynomial e_k of the occupation numbers
            std::vector<double> e(k + 1, 0.0);
            e[0] = 1.0;
            for (int cnt : counts)
                for (std::size_t j = k; j >= 1; --j) e[j] += e[j - 1] * cnt;
            distinct += p * e[k] / binomial(4, k);
        }
        EXPECT_NEAR(total, distinct, 1e-9) << "k=" << k;
    }
}

TEST(MarginalDistribution, EnumerationBound) {
    const auto u = Interferometer::haar_random(8, 1);
    DistributionOptions options;
    options.max_patterns = 10;
    EXPECT_THROW(marginal_distribution(u, first_modes_fock(8, 3), 2, 1.0, std::nullopt, options), EnumerationLimitError);
}

TEST(MarginalDistribution, WorkerCountDoesNotChangeValues) {
    const auto u = Interferometer::haar_random(8, 18);
    const auto state = first_modes_fock(8, 4);
    DistributionOptions serial, threaded;
    threaded.workers = 4;
    EXPECT_EQ(marginal_distribution(u, state, 3, 0.5, std::nullopt, serial),
              marginal_distribution(u, state, 3, 0.5, std::nullopt, threaded));
}

// Cross-pair (different emission history) terms carry the squeezer phases
// into second-order marginals; first-order marginals stay phase-free.
TEST(MarginalDistribution, GbsSecondOrderIsPhaseSensitive) {
    const auto u = Interferometer::haar_random(8, 19);
    GBSSpec spec{{{0, 1}, {2, 3}}, {0.5, 0.5}, {0.0, 0.0}};
    const auto before = gbs_state(8, spec, 4);
    spec.phi[1] = 1.3;
    const auto after = gbs_state(8, spec, 4);

    const auto first_before = marginal_distribution(u, before, 1, 1.0);
    const auto first_after = marginal_distribution(u, after, 1, 1.0);
    for (const auto& [pattern, p] : first_before) EXPECT_NEAR(p, first_after.at(pattern), 1e-14);

    const auto second_before = marginal_distribution(u, before, 2, 1.0);
    const auto second_after = marginal_distribution(u, after, 2, 1.0);
    double largest_change = 0.0;
    for (const auto& [pattern, p] : second_before) largest_change = std::max(largest_change, std::abs(p - second_after.at(pattern)));
    EXPECT_GT(largest_change, 1e-4);
}

TEST(MarginalProbability, ImaginaryResidualIsNegligible) {
    const auto u = Interferometer::haar_random(6, 20);
    const auto state = gbs_state(6, two_squeezers(), 4);
    for (std::size_t k = 1; k <= 4; ++k) {
        const MarginalPlan plan(state, k, 0.3);
        for (const auto& phi : subsets(6, k)) EXPECT_LE(std::abs(plan.evaluate_ordered(u, phi).imag()), 1e-12);
    }
}

TEST(MarginalProbability, FullOrderIdealEqualsCoherentSum) {
    // k = n, x = 1: |sum_xi c_xi Perm(M_xi,phi)|^2 for every family
    const auto u = Interferometer::haar_random(6, 22);
    for (const auto& state : {first_modes_fock(6, 2), gbs_state(6, two_squeezers(), 2), split_superposition(6, 2)}) {
        for (const auto& phi : subsets(6, 2)) {
            Complex amp = 0.0;
            for (const auto& t : state.terms()) {
                const std::vector<int> rows(t.xi.modes().begin(), t.xi.modes().end());
                amp += t.amplitude * permanent(submatrix(u, rows, phi));
            }
            EXPECT_NEAR(marginal_probability(u, state, query(phi, 1.0)), std::norm(amp), 1e-12);
        }
    }
}

} // namespace
} // namespace qmarg
