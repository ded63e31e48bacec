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
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace qmarg {

using Complex = std::complex<double>;

/// An assignment of n photons to input modes, stored as the sorted list of
/// occupied modes with repetition: |2,0,1> is (0,0,2).
class FockVector {
public:
    FockVector() = default;
    explicit FockVector(std::vector<int> modes);

    std::span<const int> modes() const noexcept { return modes_; }
    std::size_t photon_number() const noexcept { return modes_.size(); }

    /// Occupation numbers m_0..m_{N-1}.
    std::vector<int> occupations(std::size_t n_modes) const;

    friend bool operator==(const FockVector&, const FockVector&) = default;
    friend auto operator<=>(const FockVector&, const FockVector&) = default;

private:
    std::vector<int> modes_;
};

/// prod_i m_i! over the occupation numbers of a mode list (any order).
std::uint64_t multiplicity(std::span<const int> modes);
inline std::uint64_t multiplicity(const FockVector& xi) { return multiplicity(xi.modes()); }

/// c_xi = <xi|Psi> / sqrt(mu(xi)).
struct AmplitudeTerm {
    FockVector xi;
    Complex amplitude;
};

enum class StateFamily { fock, gbs, disjoint_superposition, custom };

std::string_view to_string(StateFamily family) noexcept;

inline constexpr std::size_t kDefaultMaxTerms = 100000;

/// A state projected onto the n-photon input subspace. Immutable once built.
class InputState {
public:
    /// Validates the terms; zero amplitudes are dropped. Does not renormalize.
    InputState(std::size_t n_modes, std::vector<AmplitudeTerm> terms, StateFamily family = StateFamily::custom);

    std::size_t n_modes() const noexcept { return n_modes_; }
    std::size_t photon_number() const noexcept { return photon_number_; }
    std::span<const AmplitudeTerm> terms() const noexcept { return terms_; }
    StateFamily family() const noexcept { return family_; }

    /// sum_xi |c_xi|^2 mu(xi): the weight of |Psi> inside the subspace.
    double subspace_norm() const;

    /// Copy rescaled so that subspace_norm() == 1.
    InputState renormalized() const;

private:
    std::size_t n_modes_;
    std::size_t photon_number_ = 0;
    std::vector<AmplitudeTerm> terms_;
    StateFamily family_;
};

/// Uniform pairwise overlap x between photons from different input modes.
class Distinguishability {
public:
    explicit Distinguishability(double x);
    double x() const noexcept { return x_; }

private:
    double x_;
};

/// Two-mode squeezers, source s emitting pairs into pairs[s] with squeezing
/// r[s] and phase phi[s] (zeta = r e^{i phi}).
struct GBSSpec {
    std::vector<std::pair<int, int>> pairs;
    std::vector<double> r;
    std::vector<double> phi;

    std::size_t n_squeezers() const noexcept { return pairs.size(); }
};

/// Single photons in each of `occupied_modes` (distinct).
InputState fock_state(std::size_t n_modes, std::span<const int> occupied_modes);

/// Two-mode squeezed vacuum sources conditioned on n photons in total.
InputState gbs_state(std::size_t n_modes, const GBSSpec& spec, std::size_t n_photons,
                     std::size_t max_terms = kDefaultMaxTerms);

/// (|modes1> + |modes2>)/sqrt(2) for two disjoint single-photon configurations.
InputState disjoint_superposition(std::size_t n_modes, std::span<const int> modes1, std::span<const int> modes2);

/// Arbitrary state from its overlaps <xi|Psi>, renormalized to the subspace.
InputState state_from_overlaps(std::size_t n_modes, std::span<const std::pair<FockVector, Complex>> overlaps);

/// Binomial coefficient as a double (exact for the sizes used here).
double binomial(std::size_t n, std::size_t k) noexcept;

} // namespace qmarg
