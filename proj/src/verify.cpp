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

#include "qmarg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qmarg/enumerate.hpp"
#include "qmarg/errors.hpp"
#include "qmarg/marginals.hpp"
#include "qmarg/rng.hpp"

namespace qmarg {

namespace {

constexpr double kZeroProbability = 1e-300;

double factorial(std::size_t n) noexcept {
    double out = 1.0;
    for (std::size_t i = 2; i <= n; ++i) out *= static_cast<double>(i);
    return out;
}

struct Scored {
    std::vector<double> log_likelihoods;
    std::size_t excluded = 0;
};

Scored score(const Interferometer& u, const MarginalPlan& plan, std::span<const Sample> samples,
             std::map<std::vector<int>, double>& cache) {
    Scored out;
    out.log_likelihoods.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.n_detected() != plan.photon_number()) {
            throw InvalidQueryError("contest samples must all carry " + std::to_string(plan.photon_number()) +
                                    " photons");
        }
        std::vector<int> key = s.modes;
        std::sort(key.begin(), key.end());
        auto it = cache.find(key);
        if (it == cache.end()) {
            const double ordered = plan.evaluate_ordered(u, key).real();
            it = cache.emplace(key, ordered * factorial(key.size()) / static_cast<double>(multiplicity(key))).first;
        }
        if (!(it->second > kZeroProbability)) {
            ++out.excluded;
            continue;
        }
        out.log_likelihoods.push_back(std::log(it->second));
    }
    return out;
}

double mean(std::span<const double> v) {
    double sum = 0.0;
    for (double d : v) sum += d;
    return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

double resampled_mean(std::span<const double> v, SplitMix64& rng) {
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        sum += v[static_cast<std::size_t>(rng.uniform() * static_cast<double>(v.size()))];
    }
    return sum / static_cast<double>(v.size());
}

} // namespace

std::string_view to_string(Winner w) noexcept {
    switch (w) {
    case Winner::a: return "A";
    case Winner::b: return "B";
    case Winner::tie: return "tie";
    }
    return "tie";
}

double pattern_probability(const Interferometer& u, const InputState& state, double x, std::span<const int> modes) {
    if (modes.size() != state.photon_number()) throw InvalidQueryError("pattern must hold all n photons");
    std::vector<int> key(modes.begin(), modes.end());
    std::sort(key.begin(), key.end());
    const MarginalPlan plan(state, key.size(), x);
    return plan.evaluate_ordered(u, key).real() * factorial(key.size()) / static_cast<double>(multiplicity(key));
}

ContestResult likelihood_contest(const Interferometer& u, const InputState& state, double x_model,
                                 std::span<const Sample> samples_a, std::span<const Sample> samples_b,
                                 const ContestOptions& options) {
    if (samples_a.empty() || samples_b.empty()) throw InvalidQueryError("contest needs two nonempty sample sets");
    if (options.bootstrap_resamples == 0) throw InvalidQueryError("bootstrap needs at least one resample");
    const MarginalPlan plan(state, state.photon_number(), x_model);
    std::map<std::vector<int>, double> cache;
    Scored a = score(u, plan, samples_a, cache);
    Scored b = score(u, plan, samples_b, cache);
    if (a.log_likelihoods.empty() || b.log_likelihoods.empty()) {
        throw InvalidQueryError("every sample of one set has zero model probability");
    }

    ContestResult result;
    for (double v : a.log_likelihoods) result.log_likelihood_a += v;
    for (double v : b.log_likelihoods) result.log_likelihood_b += v;
    result.mean_difference = mean(a.log_likelihoods) - mean(b.log_likelihoods);

    // Bootstrap streams follow a canonical set order so that swapping the
    // inputs mirrors the interval exactly.
    const bool swapped = a.log_likelihoods.size() != b.log_likelihoods.size()
                             ? a.log_likelihoods.size() > b.log_likelihoods.size()
                             : a.log_likelihoods > b.log_likelihoods;
    const auto& first = swapped ? b.log_likelihoods : a.log_likelihoods;
    const auto& second = swapped ? a.log_likelihoods : b.log_likelihoods;
    std::vector<double> deltas(options.bootstrap_resamples);
    for (std::size_t r = 0; r < deltas.size(); ++r) {
        SplitMix64 rng_first = SplitMix64::stream(options.seed, 2 * r);
        SplitMix64 rng_second = SplitMix64::stream(options.seed, 2 * r + 1);
        deltas[r] = resampled_mean(first, rng_first) - resampled_mean(second, rng_second);
    }
    std::sort(deltas.begin(), deltas.end());
    const double tail = 0.5 * (1.0 - options.confidence);
    const auto last = static_cast<double>(deltas.size() - 1);
    const double lo = deltas[static_cast<std::size_t>(std::floor(tail * last))];
    const double hi = deltas[static_cast<std::size_t>(std::ceil((1.0 - tail) * last))];
    result.ci_low = swapped ? -hi : lo;
    result.ci_high = swapped ? -lo : hi;

    if (result.ci_low > 0.0) result.winner = Winner::a;
    else if (result.ci_high < 0.0) result.winner = Winner::b;
    else result.winner = Winner::tie;

    result.per_sample_a = std::move(a.log_likelihoods);
    result.per_sample_b = std::move(b.log_likelihoods);
    result.excluded_a = a.excluded;
    result.excluded_b = b.excluded;
    return result;
}

std::vector<MarginalReportRow> marginal_report(std::span<const Sample> samples, std::size_t k,
                                               const std::map<std::vector<int>, double>& reference) {
    if (samples.empty()) throw InvalidQueryError("marginal report needs at least one sample");
    if (k == 0) throw InvalidQueryError("marginal order must be at least 1");
    for (const auto& s : samples) {
        if (s.n_detected() < k) {
            throw InvalidQueryError("marginal order " + std::to_string(k) + " exceeds a sample with " +
                                    std::to_string(s.n_detected()) + " photons");
        }
    }

    struct Moments {
        double sum = 0.0;
        double sum_sq = 0.0;
    };
    std::map<std::vector<int>, Moments> acc;
    for (const auto& [pattern, p] : reference) acc.try_emplace(pattern);

    for (const auto& s : samples) {
        std::vector<int> sorted = s.modes;
        std::sort(sorted.begin(), sorted.end());
        std::vector<std::pair<int, int>> occ;
        for (int m : sorted) {
            if (!occ.empty() && occ.back().first == m) ++occ.back().second;
            else occ.emplace_back(m, 1);
        }
        if (occ.size() < k) continue; // no collision-free k-subset in this sample
        const double norm = binomial(s.n_detected(), k);
        enumerate_rho(occ.size(), k, [&](std::span<const int> pick, std::span<const int>) {
            std::vector<int> pattern;
            double ways = 1.0;
            for (int i : pick) {
                pattern.push_back(occ[i].first);
                ways *= occ[i].second;
            }
            const double v = ways / norm;
            auto& m = acc[pattern];
            m.sum += v;
            m.sum_sq += v * v;
        });
    }

    const auto n = static_cast<double>(samples.size());
    std::vector<MarginalReportRow> rows;
    rows.reserve(acc.size());
    for (const auto& [pattern, m] : acc) {
        MarginalReportRow row;
        row.pattern = pattern;
        row.empirical = m.sum / n;
        const auto ref = reference.find(pattern);
        row.reference = ref == reference.end() ? 0.0 : ref->second;
        const double variance = std::max(0.0, m.sum_sq / n - row.empirical * row.empirical);
        row.std_error = std::sqrt(variance / n);
        if (row.std_error == 0.0) {
            // nothing observed (or a constant column): multinomial error of the reference
            row.std_error = std::sqrt(std::max(row.reference * (1.0 - row.reference), 1.0 / n) / n);
        }
        row.z = (row.empirical - row.reference) / row.std_error;
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace qmarg
