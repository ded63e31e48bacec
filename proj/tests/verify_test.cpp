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

#include "qmarg/errors.hpp"
#include "qmarg/marginals.hpp"
#include "qmarg/oracle.hpp"
#include "qmarg/verify.hpp"
#include "test_support.hpp"

namespace qmarg {
namespace {

struct ContestFixture {
    Interferometer u = Interferometer::haar_random(6, 60);
    InputState state = testing::first_modes_fock(6, 3);

    std::vector<Sample> draw(double x, std::uint64_t seed, std::size_t count) const {
        SamplerConfig cfg;
        cfg.seed = seed;
        cfg.distinguishability = Distinguishability(x);
        return sample(u, state, cfg, count).samples;
    }
};

TEST(PatternProbability, MatchesOracle) {
    const ContestFixture f;
    const auto d = oracle::full_distribution(f.u, f.state, 0.5);
    for (const std::vector<int>& p : {std::vector<int>{0, 1, 2}, {5, 5, 1}, {3, 3, 3}}) {
        auto key = p;
        std::sort(key.begin(), key.end());
        EXPECT_NEAR(pattern_probability(f.u, f.state, 0.5, p), d.at(key), 1e-12);
    }
}

TEST(LikelihoodContest, IdenticalSetsTie) {
    const ContestFixture f;
    const auto a = f.draw(1.0, 1, 500);
    const auto result = likelihood_contest(f.u, f.state, 1.0, a, a);
    EXPECT_EQ(result.winner, Winner::tie);
    EXPECT_DOUBLE_EQ(result.mean_difference, 0.0);
    EXPECT_LE(result.ci_low, 0.0);
    EXPECT_GE(result.ci_high, 0.0);
}

TEST(LikelihoodContest, SwappingSetsMirrorsResult) {
    const ContestFixture f;
    const auto quantum = f.draw(1.0, 2, 2000);
    const auto classical = f.draw(0.0, 3, 2000);
    const auto ab = likelihood_contest(f.u, f.state, 1.0, quantum, classical);
    const auto ba = likelihood_contest(f.u, f.state, 1.0, classical, quantum);
    EXPECT_EQ(ab.winner, Winner::a);
    EXPECT_EQ(ba.winner, Winner::b);
    EXPECT_DOUBLE_EQ(ab.mean_difference, -ba.mean_difference);
    EXPECT_DOUBLE_EQ(ab.ci_low, -ba.ci_high);
    EXPECT_DOUBLE_EQ(ab.ci_high, -ba.ci_low);
    EXPECT_EQ(ab.per_sample_a.size(), 2000u);
}

TEST(LikelihoodContest, ExcludesZeroProbabilitySamples) {
    // the HOM coincidence has zero probability at x = 1
    const auto bs = testing::beamsplitter();
    const auto state = fock_state(2, std::vector<int>{0, 1});
    const std::vector<Sample> a{{{0, 0}}, {{1, 1}}, {{0, 1}}};
    const std::vector<Sample> b{{{0, 0}}, {{1, 1}}};
    const auto result = likelihood_contest(bs, state, 1.0, a, b);
    EXPECT_EQ(result.excluded_a, 1u);
    EXPECT_EQ(result.excluded_b, 0u);
    EXPECT_TRUE(std::isfinite(result.log_likelihood_a));
}

TEST(LikelihoodContest, RejectsWrongPhotonCount) {
    const ContestFixture f;
    const std::vector<Sample> a{{{0, 1}}};
    EXPECT_THROW(likelihood_contest(f.u, f.state, 1.0, a, a), InvalidQueryError);
}

TEST(MarginalReport, ExactSamplesAreConsistent) {
    const ContestFixture f;
    const auto samples = f.draw(1.0, 9, 20000);
    for (std::size_t k : {1u, 2u}) {
        const auto table = marginal_distribution(f.u, f.state, k, 1.0);
        const auto rows = marginal_report(samples, k, table);
        EXPECT_EQ(rows.size(), table.size());
        for (const auto& row : rows) EXPECT_LT(std::abs(row.z), 4.5) << "k=" << k;
    }
}

TEST(MarginalReport, PerSampleValuesCountPairs) {
    // one sample {0,0,1}: pairs (0,0) are skipped, (0,1) appears twice out of C(3,2)
    const std::vector<Sample> samples{{{0, 0, 1}}};
    const std::map<std::vector<int>, double> reference{{{0, 1}, 0.5}, {{0, 2}, 0.0}};
    const auto rows = marginal_report(samples, 2, reference);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_NEAR(rows[0].empirical, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(rows[1].empirical, 0.0, 1e-15);
}

TEST(MarginalReport, RejectsBadInput) {
    const std::map<std::vector<int>, double> reference{{{0}, 1.0}};
    EXPECT_THROW(marginal_report(std::vector<Sample>{}, 1, reference), InvalidQueryError);
    EXPECT_THROW(marginal_report(std::vector<Sample>{{{0}}}, 2, reference), InvalidQueryError);
}

TEST(Winner, Names) {
    EXPECT_EQ(to_string(Winner::a), "A");
    EXPECT_EQ(to_string(Winner::tie), "tie");
}

} // namespace
} // namespace qmarg
