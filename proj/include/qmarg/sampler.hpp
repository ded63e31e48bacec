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
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "qmarg/marginals.hpp"
#include "qmarg/permanent.hpp"
#include "qmarg/rng.hpp"
#include "qmarg/states.hpp"

namespace qmarg {

struct SamplerConfig {
    std::uint64_t seed = 0;
    Distinguishability distinguishability{1.0};
    /// Keep interference orders up to j_max in every conditional (spoofing mode).
    std::optional<std::size_t> j_max;
    /// Photon number drawn per sample; absent means the state's own n.
    std::optional<std::map<std::size_t, double>> n_distribution;
    /// Per-photon survival probability under uniform loss.
    std::optional<double> loss_eta;
    /// 0 picks the hardware concurrency. Output does not depend on it.
    std::size_t workers = 1;
};

/// Output modes in placement order (expanded sample space).
struct Sample {
    std::vector<int> modes;

    std::size_t n_detected() const noexcept { return modes.size(); }
    friend bool operator==(const Sample&, const Sample&) = default;
};

struct SamplerStats {
    std::uint64_t clipped_weights = 0;   ///< negative conditional weights set to zero
    std::uint64_t uniform_fallbacks = 0; ///< steps whose weights all clipped to zero
};

struct SampleSet {
    std::vector<Sample> samples;
    SamplerStats stats;
};

/// Produces the n-photon state to use when the outer loop draws n.
using StateSource = std::function<InputState(std::size_t n_photons)>;

/// Places photons one at a time: photon t lands in mode c with probability
/// P(phi_1..phi_{t-1}, c) / sum_c' P(phi_1..phi_{t-1}, c'), where P is the
/// expanded-space marginal of order t (truncated to j_max when set).
class ChainRuleSampler {
public:
    ChainRuleSampler(const Interferometer& u, const InputState& state, double x,
                     std::optional<std::size_t> j_max = std::nullopt);

    std::size_t photon_number() const noexcept { return plans_.size(); }

    /// Distribution of the next photon given the placed ones. Negative
    /// weights are clipped (counted in stats); all-zero falls back to uniform.
    std::vector<double> conditional(std::span<const int> placed, SamplerStats* stats = nullptr) const;

    /// Places `photons` (<= n) photons; stopping early samples the marginal.
    std::vector<int> draw(SplitMix64& rng, std::size_t photons, SamplerStats* stats = nullptr) const;

private:
    const Interferometer* u_;
    bool exact_;
    std::vector<MarginalPlan> plans_; ///< plans_[t] has order t + 1
};

/// Chain-rule samples honoring every field of cfg.
SampleSet sample(const Interferometer& u, const InputState& state, const SamplerConfig& cfg, std::size_t count);

/// Variant whose outer loop draws n from cfg.n_distribution and asks `source` for the state.
SampleSet sample(const Interferometer& u, const StateSource& source, const SamplerConfig& cfg, std::size_t count);

/// Spoofing sampler; cfg.j_max must be set.
SampleSet sample_truncated(const Interferometer& u, const InputState& state, const SamplerConfig& cfg,
                           std::size_t count);

/// Uniform-loss sampler; cfg.loss_eta must be set. Each sample keeps
/// Binomial(n, eta) photons, placed by stopping the chain rule early.
SampleSet sample_lossy(const Interferometer& u, const InputState& state, const SamplerConfig& cfg, std::size_t count);

/// Sorted-mode histogram of the samples, normalized to 1.
std::map<std::vector<int>, double> empirical_distribution(std::span<const Sample> samples);

} // namespace qmarg
