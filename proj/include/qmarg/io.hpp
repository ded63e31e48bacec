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

// JSON file formats:
//
//   unitary        {"n_modes": N, "re": [[...]], "im": [[...]]}   (row-major, row = input mode)
//   state spec     {"type": "fock", "modes": [...]}
//                  {"type": "gbs", "pairs": [[a, b], ...], "r": [...], "phi": [...], "n_photons": n}
//                  {"type": "disjoint_superposition", "modes1": [...], "modes2": [...]}
//                  {"type": "terms", "terms": [{"modes": [...], "re": a, "im": b}, ...]}   (<xi|Psi>)
//   samples        JSON Lines; a header {"type": "header", ...config} then {"modes": [...], "n_detected": k}
//   distribution   {"n_modes": N, "n_photons": n, "x": x, "probabilities": {"0,1,2": p, ...}}
//   marginal table {"k": k, "x": x, "j_max": j|null, "table": [{"pattern": [...], "probability": p}, ...]}

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmarg/oracle.hpp"
#include "qmarg/permanent.hpp"
#include "qmarg/sampler.hpp"
#include "qmarg/states.hpp"
#include "qmarg/verify.hpp"

namespace qmarg::io {

using Json = nlohmann::json;

/// Reads a whole file as JSON; ParseError names the path on failure.
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& doc);

Interferometer interferometer_from_json(const Json& doc, double unitarity_tol = kDefaultUnitarityTol);
Json interferometer_to_json(const Interferometer& u);

/// Parsed state spec; `build` needs the mode count, which comes from the unitary.
struct StateSpec {
    std::string type;
    std::vector<int> modes;
    std::vector<int> modes1;
    std::vector<int> modes2;
    GBSSpec gbs;
    std::size_t n_photons = 0;
    std::vector<std::pair<FockVector, Complex>> overlaps;
    std::size_t max_terms = kDefaultMaxTerms; ///< bound on expanded GBS terms

    InputState build(std::size_t n_modes) const;
    /// GBS spec at another photon number, for the outer photon-number loop.
    InputState build(std::size_t n_modes, std::size_t n_photons) const;
};

StateSpec state_spec_from_json(const Json& doc);
Json state_spec_to_json(const StateSpec& spec);

struct SampleFile {
    Json header;
    std::vector<Sample> samples;
};

Json sampler_header(const SamplerConfig& cfg, std::size_t count, std::size_t n_modes, const SamplerStats& stats);
void write_samples(std::ostream& out, const Json& header, const std::vector<Sample>& samples);
SampleFile read_samples(std::istream& in);

std::string pattern_key(const std::vector<int>& modes);
std::vector<int> parse_pattern_key(const std::string& key);

Json distribution_to_json(const oracle::FullDistribution& d, double x);
oracle::FullDistribution distribution_from_json(const Json& doc);

Json marginal_table_to_json(const std::map<std::vector<int>, double>& table, std::size_t k, double x,
                            std::optional<std::size_t> j_max);
std::map<std::vector<int>, double> marginal_table_from_json(const Json& doc);

Json contest_to_json(const ContestResult& result);

} // namespace qmarg::io
