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

#include "qmarg/states.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "qmarg/errors.hpp"

namespace qmarg {

FockVector::FockVector(std::vector<int> modes) : modes_(std::move(modes)) {
    std::sort(modes_.begin(), modes_.end());
    if (!modes_.empty() && modes_.front() < 0) {
        throw BoundsError("negative mode index " + std::to_string(modes_.front()));
    }
}

std::vector<int> FockVector::occupations(std::size_t n_modes) const {
    std::vector<int> occ(n_modes, 0);
    for (int m : modes_) {
        if (static_cast<std::size_t>(m) >= n_modes) {
            throw BoundsError("mode index " + std::to_string(m) + " outside [0, " + std::to_string(n_modes) + ")");
        }
        ++occ[m];
    }
    return occ;
}

std::uint64_t multiplicity(std::span<const int> modes) {
    std::vector<int> sorted(modes.begin(), modes.end());
    std::sort(sorted.begin(), sorted.end());
    std::uint64_t mu = 1;
    std::uint64_t run = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        run = (i > 0 && sorted[i] == sorted[i - 1]) ? run + 1 : 1;
        mu *= run;
    }
    return mu;
}

std::string_view to_string(StateFamily family) noexcept {
    switch (family) {
    case StateFamily::fock: return "fock";
    case StateFamily::gbs: return "gbs";
    case StateFamily::disjoint_superposition: return "disjoint_superposition";
    case StateFamily::custom: return "custom";
    }
    return "custom";
}

InputState::InputState(std::size_t n_modes, std::vector<AmplitudeTerm> terms, StateFamily family)
    : n_modes_(n_modes), family_(family) {
    std::erase_if(terms, [](const AmplitudeTerm& t) { return t.amplitude == Complex(0.0); });
    if (terms.empty()) throw InvalidStateError("state has no nonzero amplitude in the subspace");

    photon_number_ = terms.front().xi.photon_number();
    std::set<FockVector> seen;
    for (const auto& t : terms) {
        if (!std::isfinite(t.amplitude.real()) || !std::isfinite(t.amplitude.imag())) {
            throw InvalidStateError("amplitude must be finite");
        }
        if (t.xi.photon_number() != photon_number_) {
            throw InvalidStateError("all terms must carry the same photon number");
        }
        for (int m : t.xi.modes()) {
            if (static_cast<std::size_t>(m) >= n_modes_) {
                throw BoundsError("mode index " + std::to_string(m) + " outside [0, " +
                                  std::to_string(n_modes_) + ")");
            }
        }
        if (!seen.insert(t.xi).second) throw InvalidStateError("duplicate Fock vector in state");
    }
    terms_ = std::move(terms);
    if (subspace_norm() > 1.0 + 1e-12) {
        throw InvalidStateError("subspace norm exceeds 1: " + std::to_string(subspace_norm()));
    }
}

double InputState::subspace_norm() const {
    double total = 0.0;
    for (const auto& t : terms_) total += std::norm(t.amplitude) * static_cast<double>(multiplicity(t.xi));
    return total;
}

InputState InputState::renormalized() const {
    const double scale = 1.0 / std::sqrt(subspace_norm());
    std::vector<AmplitudeTerm> scaled(terms_.begin(), terms_.end());
    for (auto& t : scaled) t.amplitude *= scale;
    return InputState(n_modes_, std::move(scaled), family_);
}

Distinguishability::Distinguishability(double x) : x_(x) {
    if (!(x >= 0.0 && x <= 1.0)) throw InvalidQueryError("distinguishability x must lie in [0, 1]");
}

InputState fock_state(std::size_t n_modes, std::span<const int> occupied_modes) {
    std::vector<int> modes(occupied_modes.begin(), occupied_modes.end());
    std::sort(modes.begin(), modes.end());
    if (std::adjacent_find(modes.begin(), modes.end()) != modes.end()) {
        throw InvalidStateError("fock_state takes distinct modes (one photon per mode)");
    }
    return InputState(n_modes, {{FockVector(std::move(modes)), 1.0}}, StateFamily::fock);
}

namespace {

void check_pairs(std::size_t n_modes, const GBSSpec& spec) {
    if (spec.pairs.empty()) throw InvalidStateError("GBS spec needs at least one squeezer");
    if (spec.r.size() != spec.pairs.size() || spec.phi.size() != spec.pairs.size()) {
        throw InvalidStateError("GBS spec needs one r and one phi per squeezer");
    }
    std::set<int> used;
    for (auto [a, b] : spec.pairs) {
        for (int m : {a, b}) {
            if (m < 0 || static_cast<std::size_t>(m) >= n_modes) {
                throw BoundsError("squeezer mode " + std::to_string(m) + " outside [0, " +
                                  std::to_string(n_modes) + ")");
            }
            if (!used.insert(m).second) throw InvalidStateError("squeezer mode pairs must be disjoint");
        }
    }
    for (double r : spec.r) {
        if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidStateError("squeezing r must be finite and >= 0");
    }
}

// Visits every composition p_0 + ... + p_{S-1} = total with p_s >= 0.
template <typename Fn>
void for_each_composition(std::vector<int>& parts, std::size_t pos, int remaining, Fn&& fn) {
    if (pos + 1 == parts.size()) {
        parts[pos] = remaining;
        fn(parts);
        return;
    }
    for (int p = remaining; p >= 0; --p) {
        parts[pos] = p;
        for_each_composition(parts, pos + 1, remaining - p, fn);
    }
}

} // namespace

InputState gbs_state(std::size_t n_modes, const GBSSpec& spec, std::size_t n_photons, std::size_t max_terms) {
    check_pairs(n_modes, spec);
    if (n_photons % 2 != 0) {
        throw InvalidStateError("GBS photon number must be even, got " + std::to_string(n_photons));
    }
    const std::size_t n_pairs = n_photons / 2;
    const std::size_t n_sources = spec.n_squeezers();
    const double n_terms = binomial(n_sources + n_pairs - 1, n_pairs);
    if (n_terms > static_cast<double>(max_terms)) {
        throw EnumerationLimitError("GBS subspace has " + std::to_string(static_cast<long long>(n_terms)) +
                                    " terms, limit is " + std::to_string(max_terms));
    }

    // <xi|Psi> = prod_s sech(r_s) (e^{-i phi_s} tanh r_s)^{p_s}
    std::vector<AmplitudeTerm> terms;
    std::vector<int> parts(n_sources, 0);
    for_each_composition(parts, 0, static_cast<int>(n_pairs), [&](const std::vector<int>& p) {
        std::vector<int> modes;
        Complex overlap = 1.0;
        for (std::size_t s = 0; s < n_sources; ++s) {
            const Complex z = std::polar(std::tanh(spec.r[s]), -spec.phi[s]);
            overlap *= std::pow(z, p[s]) / std::cosh(spec.r[s]);
            for (int rep = 0; rep < p[s]; ++rep) {
                modes.push_back(spec.pairs[s].first);
                modes.push_back(spec.pairs[s].second);
            }
        }
        FockVector xi(std::move(modes));
        const double mu = static_cast<double>(multiplicity(xi));
        terms.push_back({std::move(xi), overlap / std::sqrt(mu)});
    });

    // Tiny overlaps are rescaled before validation so the norm check sees O(1) numbers.
    double norm = 0.0;
    for (const auto& t : terms) norm += std::norm(t.amplitude) * static_cast<double>(multiplicity(t.xi));
    if (!(norm > 0.0)) throw InvalidStateError("GBS state has no weight at this photon number");
    for (auto& t : terms) t.amplitude /= std::sqrt(norm);
    return InputState(n_modes, std::move(terms), StateFamily::gbs).renormalized();
}

InputState disjoint_superposition(std::size_t n_modes, std::span<const int> modes1, std::span<const int> modes2) {
    if (modes1.size() != modes2.size()) {
        throw InvalidStateError("superposed configurations must carry equal photon numbers");
    }
    std::set<int> first(modes1.begin(), modes1.end());
    std::set<int> second(modes2.begin(), modes2.end());
    if (first.size() != modes1.size() || second.size() != modes2.size()) {
        throw InvalidStateError("each configuration takes distinct modes");
    }
    for (int m : second) {
        if (first.contains(m)) {
            throw InvalidStateError("configurations overlap in mode " + std::to_string(m));
        }
    }
    const double amp = 1.0 / std::sqrt(2.0);
    return InputState(n_modes,
                      {{FockVector({modes1.begin(), modes1.end()}), amp},
                       {FockVector({modes2.begin(), modes2.end()}), amp}},
                      StateFamily::disjoint_superposition);
}

InputState state_from_overlaps(std::size_t n_modes, std::span<const std::pair<FockVector, Complex>> overlaps) {
    std::vector<AmplitudeTerm> terms;
    double norm = 0.0;
    for (const auto& [xi, overlap] : overlaps) norm += std::norm(overlap);
    if (!(norm > 0.0) || !std::isfinite(norm)) throw InvalidStateError("state has zero or infinite norm");
    for (const auto& [xi, overlap] : overlaps) {
        const double mu = static_cast<double>(multiplicity(xi));
        terms.push_back({xi, overlap / std::sqrt(norm * mu)});
    }
    return InputState(n_modes, std::move(terms), StateFamily::custom).renormalized();
}

double binomial(std::size_t n, std::size_t k) noexcept {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double out = 1.0;
    for (std::size_t i = 1; i <= k; ++i) out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(out);
}

} // namespace qmarg
