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
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "qmarg/permanent.hpp"
#include "qmarg/states.hpp"

namespace qmarg {

/// k output modes. Unordered patterns name the set of modes that each catch
/// one of the k retained photons; ordered patterns live in the expanded
/// sample space, where photon i lands in modes[i], and carry 1/k! of the
/// unordered weight.
struct OutputPattern {
    std::vector<int> modes;
    bool ordered = false;

    std::size_t size() const noexcept { return modes.size(); }
};

inline constexpr std::size_t kDefaultMaxPlanTerms = 2000000;

/// What to evaluate: the pattern, the photon overlap, and an optional cap on
/// the interference order (absent means the exact marginal).
struct MarginalQuery {
    OutputPattern pattern;
    Distinguishability distinguishability{1.0};
    std::optional<std::size_t> j_max;
    std::size_t max_plan_terms = kDefaultMaxPlanTerms;
};

inline constexpr double kRealnessTol = 1e-10;

/// State-side part of the k-photon marginal, independent of the output modes.
///
/// For every input pair (xi, chi) and every way of keeping k of xi's photons
/// (the multiset S, the others being marginalized), the photons of chi left
/// after removing the marginalized ones form a multiset D; the marginalized
/// photons must match exactly, so only arrangements L of D pair with S. Each
/// (S, L) carries weight c_xi conj(c_chi) mu(chi) x^j, where j counts the
/// positions at which S and L name different input modes.
///
///     P_ordered(phi_1..phi_k) = (n-k)!/n! * sum_{(S,L)} w * Perm(M_{S,phi} o conj M_{L,phi})
///
/// The formula holds for repeated output modes too, which is what the
/// sampler relies on when a photon lands in an occupied mode.
class MarginalPlan {
public:
    struct Term {
        std::vector<int> ket_rows;
        std::vector<int> bra_rows;
        Complex weight;
        int order = 0; ///< x exponent j
    };

    MarginalPlan(const InputState& state, std::size_t k, double x, std::optional<std::size_t> j_max = std::nullopt,
                 std::size_t max_terms = kDefaultMaxPlanTerms);

    std::size_t order() const noexcept { return k_; }
    std::size_t photon_number() const noexcept { return n_; }
    std::span<const Term> terms() const noexcept { return terms_; }

    /// Expanded-space marginal of the ordered mode list (length k, repeats allowed).
    Complex evaluate_ordered(const Interferometer& u, std::span<const int> modes) const;

    /// Ordered marginal of (prefix..., c) for every output mode c, where
    /// prefix has length k-1. One Laplace expansion along the new column per term.
    std::vector<Complex> evaluate_extensions(const Interferometer& u, std::span<const int> prefix) const;

private:
    std::size_t n_ = 0;
    std::size_t k_ = 0;
    double prefactor_ = 1.0;
    std::vector<Term> terms_;
};

/// Exact marginal probability of the pattern (distinct modes only).
double marginal_probability(const Interferometer& u, const InputState& state, const MarginalQuery& q);

/// Same sum keeping interference orders j <= j_max. May be negative.
double truncated_marginal(const Interferometer& u, const InputState& state, const MarginalQuery& q);

struct DistributionOptions {
    std::size_t max_patterns = 1000000;
    std::size_t max_plan_terms = kDefaultMaxPlanTerms;
    std::size_t workers = 1;
};

/// Unordered k-marginal of every collision-free k-mode set, keyed by the sorted mode list.
std::map<std::vector<int>, double> marginal_distribution(const Interferometer& u, const InputState& state,
                                                         std::size_t k, double x,
                                                         std::optional<std::size_t> j_max = std::nullopt,
                                                         const DistributionOptions& options = {});

/// First-order marginal for GBS with equal squeezing: (1/m) sum_j |U_{j,c}|^2
/// over the m squeezed input modes, for each output mode c.
std::vector<double> gbs_first_order_marginal(const Interferometer& u, const GBSSpec& spec);

namespace detail {

/// Term-by-term evaluation of the marginal sum over (xi, chi, sigma in S_n, rho)
/// with the complement delta, without the multiset bookkeeping of
/// MarginalPlan. With `moved_inside_rho` only permutations whose moved
/// positions all lie in rho contribute.
double marginal_probability_literal(const Interferometer& u, const InputState& state, std::span<const int> modes,
                                    double x, std::optional<std::size_t> j_max = std::nullopt,
                                    bool moved_inside_rho = false);

} // namespace detail

} // namespace qmarg
