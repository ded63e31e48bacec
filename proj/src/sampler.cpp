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

#include "qmarg/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

#include "qmarg/errors.hpp"
#include "qmarg/parallel.hpp"

namespace qmarg {

namespace {

constexpr double kNegativeSlack = 1e-12;

std::size_t draw_index(SplitMix64& rng, std::span<const double> weights) {
    const double target = rng.uniform();
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        cumulative += weights[i];
        last_positive = i;
        if (target < cumulative) return i;
    }
    return last_positive; // rounding left target just above the final cumulative sum
}

void validate_config(const SamplerConfig& cfg) {
    if (cfg.loss_eta && !(*cfg.loss_eta >= 0.0 && *cfg.loss_eta <= 1.0)) {
        throw InvalidQueryError("loss_eta must lie in [0, 1]");
    }
    if (cfg.n_distribution) {
        double total = 0.0;
        for (auto [n, p] : *cfg.n_distribution) {
            if (!(p >= 0.0)) throw InvalidQueryError("n_distribution probabilities must be >= 0");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9) throw InvalidQueryError("n_distribution must sum to 1");
    }
}

} // namespace

ChainRuleSampler::ChainRuleSampler(const Interferometer& u, const InputState& state, double x,
                                   std::optional<std::size_t> j_max)
    : u_(&u), exact_(!j_max) {
    if (u.n_modes() != state.n_modes()) throw InvalidQueryError("interferometer and state mode counts differ");
    const std::size_t n = state.photon_number();
    plans_.reserve(n);
    for (std::size_t k = 1; k <= n; ++k) {
        std::optional<std::size_t> cap;
        if (j_max && *j_max < k) cap = *j_max;
        plans_.emplace_back(state, k, x, cap);
    }
}

std::vector<double> ChainRuleSampler::conditional(std::span<const int> placed, SamplerStats* stats) const {
    if (placed.size() >= plans_.size()) throw InvalidQueryError("all photons already placed");
    const auto raw = plans_[placed.size()].evaluate_extensions(*u_, placed);

    std::vector<double> weights(raw.size());
    double total = 0.0;
    double scale = 0.0;
    for (std::size_t c = 0; c < raw.size(); ++c) {
        weights[c] = raw[c].real();
        scale = std::max(scale, std::abs(weights[c]));
    }
    for (auto& w : weights) {
        if (w < 0.0) {
            if (exact_ && w < -kNegativeSlack * std::max(scale, 1e-300) - 1e-15) {
                throw ConsistencyError("exact conditional weight is negative: " + std::to_string(w));
            }
            if (!exact_ && stats) ++stats->clipped_weights;
            w = 0.0;
        }
        total += w;
    }

    if (!(total > 0.0)) {
        if (exact_) throw ConsistencyError("exact conditional normalizer is not positive");
        if (stats) ++stats->uniform_fallbacks;
        std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(weights.size()));
        return weights;
    }
#ifndef NDEBUG
    if (exact_) {
        // chain-rule consistency: the extensions must sum to the prefix marginal
        const double prefix = placed.empty() ? 1.0 : plans_[placed.size() - 1].evaluate_ordered(*u_, placed).real();
        if (std::abs(total - prefix) > 1e-9 * std::max(1.0, prefix)) {
            throw ConsistencyError("conditional normalizer " + std::to_string(total) + " differs from prefix marginal " +
                                   std::to_string(prefix));
        }
    }
#endif
    for (auto& w : weights) w /= total;
    return weights;
}

std::vector<int> ChainRuleSampler::draw(SplitMix64& rng, std::size_t photons, SamplerStats* stats) const {
    if (photons > plans_.size()) throw InvalidQueryError("cannot place more photons than the state carries");
    std::vector<int> placed;
    placed.reserve(photons);
    for (std::size_t t = 0; t < photons; ++t) {
        const auto weights = conditional(placed, stats);
        placed.push_back(static_cast<int>(draw_index(rng, weights)));
    }
    return placed;
}

SampleSet sample(const Interferometer& u, const StateSource& source, const SamplerConfig& cfg, std::size_t count) {
    validate_config(cfg);
    const double x = cfg.distinguishability.x();

    // One sampler per photon number that the outer loop can produce.
    std::vector<std::size_t> photon_numbers;
    std::vector<double> photon_weights;
    std::map<std::size_t, ChainRuleSampler> samplers;
    if (cfg.n_distribution) {
        for (auto [n, p] : *cfg.n_distribution) {
            photon_numbers.push_back(n);
            photon_weights.push_back(p);
            if (p > 0.0) samplers.emplace(n, ChainRuleSampler(u, source(n), x, cfg.j_max));
        }
    } else {
        const InputState state = source(0);
        photon_numbers.push_back(state.photon_number());
        photon_weights.push_back(1.0);
        samplers.emplace(state.photon_number(), ChainRuleSampler(u, state, x, cfg.j_max));
    }
    for (const auto& [n, s] : samplers) {
        if (s.photon_number() != n) {
            throw InvalidStateError("state source returned " + std::to_string(s.photon_number()) +
                                    " photons when asked for " + std::to_string(n));
        }
    }

    SampleSet out;
    out.samples.resize(count);
    std::vector<SamplerStats> per_sample(count);
    parallel_for(count, cfg.workers, [&](std::size_t i) {
        SplitMix64 rng = SplitMix64::stream(cfg.seed, i);
        const std::size_t n =
            photon_numbers.size() == 1 ? photon_numbers.front() : photon_numbers[draw_index(rng, photon_weights)];
        std::size_t survivors = n;
        if (cfg.loss_eta) {
            survivors = 0;
            for (std::size_t p = 0; p < n; ++p) survivors += rng.uniform() < *cfg.loss_eta ? 1 : 0;
        }
        out.samples[i].modes = samplers.at(n).draw(rng, survivors, &per_sample[i]);
    });

    for (const auto& s : per_sample) {
        out.stats.clipped_weights += s.clipped_weights;
        out.stats.uniform_fallbacks += s.uniform_fallbacks;
    }
    if (out.stats.uniform_fallbacks > 0) {
        std::clog << "qmarg: " << out.stats.uniform_fallbacks
                  << " truncated conditional(s) clipped to zero everywhere; drew uniformly\n";
    }
    return out;
}

SampleSet sample(const Interferometer& u, const InputState& state, const SamplerConfig& cfg, std::size_t count) {
    if (cfg.n_distribution) {
        for (auto [n, p] : *cfg.n_distribution) {
            if (p > 0.0 && n != state.photon_number()) {
                throw InvalidQueryError("n_distribution asks for " + std::to_string(n) +
                                        " photons; pass a StateSource to sample other photon numbers");
            }
        }
    }
    return sample(u, StateSource([&state](std::size_t) { return state; }), cfg, count);
}

SampleSet sample_truncated(const Interferometer& u, const InputState& state, const SamplerConfig& cfg,
                           std::size_t count) {
    if (!cfg.j_max) throw InvalidQueryError("truncated sampling needs j_max");
    return sample(u, state, cfg, count);
}

SampleSet sample_lossy(const Interferometer& u, const InputState& state, const SamplerConfig& cfg, std::size_t count) {
    if (!cfg.loss_eta) throw InvalidQueryError("lossy sampling needs loss_eta");
    return sample(u, state, cfg, count);
}

std::map<std::vector<int>, double> empirical_distribution(std::span<const Sample> samples) {
    std::map<std::vector<int>, double> hist;
    for (const auto& s : samples) {
        std::vector<int> key = s.modes;
        std::sort(key.begin(), key.end());
        hist[key] += 1.0;
    }
    for (auto& [key, v] : hist) v /= static_cast<double>(samples.size());
    return hist;
}

} // namespace qmarg
