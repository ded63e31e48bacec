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
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "qmarg/permanent.hpp"
#include "qmarg/sampler.hpp"
#include "qmarg/states.hpp"

namespace qmarg {

enum class Winner { a, b, tie };

std::string_view to_string(Winner w) noexcept;

/// Outcome of a log-likelihood-ratio contest between two sample sets.
///
/// The statistic is the difference of mean per-sample log-likelihoods under
/// the model (equal to the difference of totals for equal set sizes). A
/// nonparametric bootstrap of that difference gives the tie band.
struct ContestResult {
    double log_likelihood_a = 0.0;
    double log_likelihood_b = 0.0;
    double mean_difference = 0.0; ///< mean_a - mean_b
    double ci_low = 0.0;
    double ci_high = 0.0;
    Winner winner = Winner::tie;
    std::vector<double> per_sample_a;
    std::vector<double> per_sample_b;
    std::size_t excluded_a = 0; ///< samples with zero model probability
    std::size_t excluded_b = 0;
};

struct ContestOptions {
    std::size_t bootstrap_resamples = 1000;
    double confidence = 0.95;
    std::uint64_t seed = 0;
};

ContestResult likelihood_contest(const Interferometer& u, const InputState& state, double x_model,
                                 std::span<const Sample> samples_a, std::span<const Sample> samples_b,
                                 const ContestOptions& options = {});

/// Model probability of the sample's sorted output pattern (collisions allowed).
double pattern_probability(const Interferometer& u, const InputState& state, double x, std::span<const int> modes);

struct MarginalReportRow {
    std::vector<int> pattern;
    double empirical = 0.0;
    double reference = 0.0;
    double std_error = 0.0;
    double z = 0.0;
};

/// Empirical unordered k-marginals of the samples against a reference table.
/// A sample with n photons contributes prod_{m in pattern} n_m / C(n, k) to
/// each k-mode pattern, which averages to the k-marginal.
std::vector<MarginalReportRow> marginal_report(std::span<const Sample> samples, std::size_t k,
                                               const std::map<std::vector<int>, double>& reference);

} // namespace qmarg
