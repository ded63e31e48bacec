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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace qmarg {

using Complex = std::complex<double>;

/// Dense row-major complex matrix. Entries are always finite.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static ComplexMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    Complex& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<const Complex> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }
    std::span<const Complex> data() const noexcept { return data_; }

    ComplexMatrix adjoint() const;
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

/// Largest ‖A‖ entry of A†A − I, the figure checked against the unitarity tolerance.
double unitarity_residual(const ComplexMatrix& m);

inline constexpr double kDefaultUnitarityTol = 1e-10;

/// Lossless N-mode linear optical network. Entry (i, j) is the amplitude for a
/// photon entering input mode i to leave through output mode j.
class Interferometer {
public:
    explicit Interferometer(ComplexMatrix matrix, double unitarity_tol = kDefaultUnitarityTol);

    /// Haar-random unitary, reproducible from the seed.
    static Interferometer haar_random(std::size_t n_modes, std::uint64_t seed);

    std::size_t n_modes() const noexcept { return matrix_.rows(); }
    const ComplexMatrix& matrix() const noexcept { return matrix_; }
    const Complex& operator()(std::size_t in, std::size_t out) const noexcept { return matrix_(in, out); }

private:
    ComplexMatrix matrix_;
};

/// Largest matrix size accepted by permanent(); 2^s terms are summed.
inline constexpr std::size_t kMaxPermanentSize = 30;

/// Permanent via Ryser's formula with Gray-code column updates, O(2^s s).
/// The 0x0 permanent is 1. Throws DimensionError for non-square input.
Complex permanent(const ComplexMatrix& m);

/// Rows and columns of U picked by (possibly repeated) mode lists.
ComplexMatrix submatrix(const Interferometer& u, std::span<const int> rows, std::span<const int> cols);

/// Perm(c) with c[i][j] = a[i][j] * conj(b[i][j]).
Complex hadamard_conj_permanent(const ComplexMatrix& a, const ComplexMatrix& b);

namespace detail {

/// Direct sum over all s! permutations; reference for small matrices only.
Complex permanent_naive(const ComplexMatrix& m);

} // namespace detail

} // namespace qmarg
