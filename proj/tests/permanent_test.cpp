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

#include <algorithm>
#include <numeric>

#include "qmarg/errors.hpp"
#include "qmarg/permanent.hpp"
#include "test_support.hpp"

namespace qmarg {
namespace {

using testing::random_matrix;

void expect_close(Complex got, Complex want, double rel) {
    const double scale = std::max(1.0, std::abs(want));
    EXPECT_LE(std::abs(got - want), rel * scale) << "got " << got << " want " << want;
}

TEST(Permanent, EmptyMatrixIsOne) {
    EXPECT_EQ(permanent(ComplexMatrix(0, 0)), Complex(1.0));
}

TEST(Permanent, TwoByTwoDefinition) {
    const Complex a(1, 2), b(-0.5, 0.25), c(3, -1), d(0.1, 0.7);
    expect_close(permanent(ComplexMatrix{{a, b}, {c, d}}), a * d + b * c, 1e-15);
}

TEST(Permanent, RejectsNonSquare) {
    EXPECT_THROW(permanent(ComplexMatrix(2, 3)), DimensionError);
}

TEST(Permanent, RejectsNonFiniteEntries) {
    EXPECT_THROW(ComplexMatrix(1, 1, {Complex(std::nan(""), 0.0)}), DimensionError);
}

TEST(Permanent, MatchesPermutationSumUpToSeven) {
    for (std::size_t s = 0; s <= 7; ++s) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto m = random_matrix(s, s, 100 * s + seed);
            expect_close(permanent(m), detail::permanent_naive(m), 1e-12);
        }
    }
}

TEST(Permanent, InvariantUnderRowAndColumnPermutation) {
    const auto m = random_matrix(5, 5, 42);
    const Complex reference = permanent(m);
    std::vector<std::size_t> order{3, 0, 4, 1, 2};
    ComplexMatrix rows(5, 5), cols(5, 5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) {
            rows(i, j) = m(order[i], j);
            cols(i, j) = m(i, order[j]);
        }
    expect_close(permanent(rows), reference, 1e-12);
    expect_close(permanent(cols), reference, 1e-12);
}

TEST(Permanent, HandlesTwentyByTwenty) {
    // block-diagonal: the permanent factorizes over the four 5x5 blocks
    ComplexMatrix m(20, 20);
    Complex expected = 1.0;
    for (std::size_t b = 0; b < 4; ++b) {
        const auto block = random_matrix(5, 5, 500 + b);
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 5; ++j) m(5 * b + i, 5 * b + j) = block(i, j);
        expected *= detail::permanent_naive(block);
    }
    const Complex got = permanent(m);
    EXPECT_LE(std::abs(got - expected), 1e-9 * std::abs(expected));
}

TEST(Submatrix, IdentityPicksIdentity) {
    const Interferometer u(ComplexMatrix::identity(4));
    const std::vector<int> idx{0, 1};
    EXPECT_EQ(submatrix(u, idx, idx), ComplexMatrix::identity(2));
}

TEST(Submatrix, RepeatedRowsRepeat) {
    const auto u = Interferometer::haar_random(4, 7);
    const std::vector<int> rows{0, 0};
    const std::vector<int> cols{2, 3};
    const auto m = submatrix(u, rows, cols);
    for (std::size_t r = 0; r < 2; ++r) {
        EXPECT_EQ(m(r, 0), u(0, 2));
        EXPECT_EQ(m(r, 1), u(0, 3));
    }
}

TEST(Submatrix, MatchesDirectIndexing) {
    const auto u = Interferometer::haar_random(6, 11);
    const std::vector<int> rows{1, 4, 4, 0};
    const std::vector<int> cols{5, 2, 3, 2};
    const auto m = submatrix(u, rows, cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) EXPECT_EQ(m(i, j), u.matrix()(rows[i], cols[j]));
}

TEST(Submatrix, RejectsOutOfRangeIndex) {
    const auto u = Interferometer::haar_random(3, 1);
    const std::vector<int> bad{0, 3};
    const std::vector<int> ok{0, 1};
    EXPECT_THROW(submatrix(u, bad, ok), BoundsError);
    EXPECT_THROW(submatrix(u, ok, std::vector<int>{-1, 0}), BoundsError);
}

TEST(HadamardConjPermanent, IdentityPair) {
    expect_close(hadamard_conj_permanent(ComplexMatrix::identity(2), ComplexMatrix::identity(2)), 1.0, 1e-15);
}

TEST(HadamardConjPermanent, AllOnesSecondFactorGivesPermanent) {
    const auto a = random_matrix(4, 4, 3);
    ComplexMatrix ones(4, 4, std::vector<Complex>(16, Complex(1.0)));
    expect_close(hadamard_conj_permanent(a, ones), permanent(a), 1e-13);
}

TEST(HadamardConjPermanent, MatchesExplicitProduct) {
    const auto a = random_matrix(4, 4, 5);
    const auto b = random_matrix(4, 4, 6);
    ComplexMatrix c(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) c(i, j) = a(i, j) * std::conj(b(i, j));
    expect_close(hadamard_conj_permanent(a, b), detail::permanent_naive(c), 1e-12);
}

TEST(HadamardConjPermanent, RejectsShapeMismatch) {
    EXPECT_THROW(hadamard_conj_permanent(ComplexMatrix(2, 2), ComplexMatrix(3, 3)), DimensionError);
}

TEST(Interferometer, RejectsNonUnitary) {
    EXPECT_THROW(Interferometer(ComplexMatrix{{1.0, 0.1}, {0.0, 1.0}}), UnitarityError);
    EXPECT_THROW(Interferometer(ComplexMatrix(2, 3)), DimensionError);
}

TEST(Interferometer, HaarRandomIsUnitaryAndReproducible) {
    for (std::size_t n : {1u, 2u, 5u, 12u}) {
        const auto u = Interferometer::haar_random(n, 99);
        EXPECT_LE(unitarity_residual(u.matrix()), 1e-12);
        EXPECT_EQ(u.matrix(), Interferometer::haar_random(n, 99).matrix());
    }
}

// Product of two permanents expands into a sum of elementwise-product
// permanents over all row permutations of the second factor.
TEST(PermanentIdentities, ProductExpansion) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const std::size_t s = 1 + seed % 5;
        const auto u = Interferometer::haar_random(6, 1000 + seed);
        SplitMix64 rng(seed);
        std::vector<int> xi(s), chi(s), phi(s);
        for (auto* v : {&xi, &chi, &phi})
            for (auto& m : *v) m = static_cast<int>(rng() % 6);
        const auto m_xi = submatrix(u, xi, phi);
        const Complex lhs = permanent(m_xi) * std::conj(permanent(submatrix(u, chi, phi)));

        std::vector<int> order(s);
        std::iota(order.begin(), order.end(), 0);
        Complex rhs = 0.0;
        do {
            std::vector<int> permuted(s);
            for (std::size_t i = 0; i < s; ++i) permuted[i] = chi[order[i]];
            rhs += hadamard_conj_permanent(m_xi, submatrix(u, permuted, phi));
        } while (std::next_permutation(order.begin(), order.end()));
        expect_close(rhs, lhs, 1e-10);
    }
}

} // namespace
} // namespace qmarg
