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

#include "qmarg/permanent.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "qmarg/errors.hpp"
#include "qmarg/rng.hpp"

namespace qmarg {

namespace {

void require_finite(std::span<const Complex> entries) {
    for (const auto& z : entries) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw DimensionError("matrix entries must be finite");
        }
    }
}

} // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("expected " + std::to_string(rows_ * cols_) + " entries, got " +
                             std::to_string(data_.size()));
    }
    require_finite(data_);
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionError("ragged matrix literal");
        data_.insert(data_.end(), r.begin(), r.end());
    }
    require_finite(data_);
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("matrix product shape mismatch");
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

double unitarity_residual(const ComplexMatrix& m) {
    if (!m.is_square()) throw DimensionError("unitarity check needs a square matrix");
    const ComplexMatrix g = m.adjoint() * m;
    double worst = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j)
            worst = std::max(worst, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    return worst;
}

Interferometer::Interferometer(ComplexMatrix matrix, double unitarity_tol) : matrix_(std::move(matrix)) {
    if (!matrix_.is_square()) {
        throw DimensionError("interferometer matrix must be square, got " + std::to_string(matrix_.rows()) +
                             "x" + std::to_string(matrix_.cols()));
    }
    const double residual = unitarity_residual(matrix_);
    if (!(residual <= unitarity_tol)) {
        throw UnitarityError("unitarity violated: max |U^dag U - I| = " + std::to_string(residual));
    }
}

Interferometer Interferometer::haar_random(std::size_t n_modes, std::uint64_t seed) {
    // Gram-Schmidt on a complex Ginibre matrix is QR with positive diag(R), which is Haar.
    SplitMix64 rng(seed);
    std::vector<std::vector<Complex>> cols(n_modes, std::vector<Complex>(n_modes));
    for (auto& col : cols)
        for (auto& z : col) z = Complex(rng.normal(), rng.normal()) / std::sqrt(2.0);

    for (std::size_t j = 0; j < n_modes; ++j) {
        // two passes keep orthogonality at machine precision
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t p = 0; p < j; ++p) {
                Complex overlap = 0.0;
                for (std::size_t i = 0; i < n_modes; ++i) overlap += std::conj(cols[p][i]) * cols[j][i];
                for (std::size_t i = 0; i < n_modes; ++i) cols[j][i] -= overlap * cols[p][i];
            }
        }
        double norm = 0.0;
        for (const auto& z : cols[j]) norm += std::norm(z);
        norm = std::sqrt(norm);
        for (auto& z : cols[j]) z /= norm;
    }

    ComplexMatrix m(n_modes, n_modes);
    for (std::size_t i = 0; i < n_modes; ++i)
        for (std::size_t j = 0; j < n_modes; ++j) m(i, j) = cols[j][i];
    return Interferometer(std::move(m));
}

Complex permanent(const ComplexMatrix& m) {
    if (!m.is_square()) {
        throw DimensionError("permanent needs a square matrix, got " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()));
    }
    const std::size_t n = m.rows();
    if (n == 0) return 1.0;
    if (n == 1) return m(0, 0);
    if (n == 2) return m(0, 0) * m(1, 1) + m(0, 1) * m(1, 0);
    if (n > kMaxPermanentSize) {
        throw DimensionError("permanent size " + std::to_string(n) + " exceeds limit " +
                             std::to_string(kMaxPermanentSize));
    }

    // Ryser: Perm(A) = (-1)^n sum_{S} (-1)^{|S|} prod_i sum_{j in S} a_ij,
    // walking the subsets S in Gray-code order so each step adds or removes one column.
    std::vector<Complex> row_sums(n, Complex(0.0));
    Complex total = 0.0;
    std::uint64_t gray = 0;
    const std::uint64_t n_subsets = std::uint64_t{1} << n;
    for (std::uint64_t step = 1; step < n_subsets; ++step) {
        const int col = std::countr_zero(step);
        const std::uint64_t bit = std::uint64_t{1} << col;
        gray ^= bit;
        if (gray & bit) {
            for (std::size_t i = 0; i < n; ++i) row_sums[i] += m(i, col);
        } else {
            for (std::size_t i = 0; i < n; ++i) row_sums[i] -= m(i, col);
        }
        Complex prod = row_sums[0];
        for (std::size_t i = 1; i < n; ++i) prod *= row_sums[i];
        if (std::popcount(gray) & 1) total -= prod;
        else total += prod;
    }
    return (n & 1) ? -total : total;
}

ComplexMatrix submatrix(const Interferometer& u, std::span<const int> rows, std::span<const int> cols) {
    const auto n = static_cast<int>(u.n_modes());
    auto check = [n](int idx) {
        if (idx < 0 || idx >= n) {
            throw BoundsError("mode index " + std::to_string(idx) + " outside [0, " + std::to_string(n) + ")");
        }
    };
    std::for_each(rows.begin(), rows.end(), check);
    std::for_each(cols.begin(), cols.end(), check);

    ComplexMatrix out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = u(rows[i], cols[j]);
    return out;
}

Complex hadamard_conj_permanent(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("elementwise product needs equal shapes");
    }
    ComplexMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) * std::conj(b(i, j));
    return permanent(c);
}

namespace detail {

Complex permanent_naive(const ComplexMatrix& m) {
    if (!m.is_square()) throw DimensionError("permanent needs a square matrix");
    const std::size_t n = m.rows();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Complex total = 0.0;
    do {
        Complex prod = 1.0;
        for (std::size_t i = 0; i < n; ++i) prod *= m(i, perm[i]);
        total += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

} // namespace detail

} // namespace qmarg
