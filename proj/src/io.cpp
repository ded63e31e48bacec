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

#include "qmarg/io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "qmarg/errors.hpp"

namespace qmarg::io {

namespace {

template <typename T>
T field(const Json& doc, const char* name) {
    if (!doc.is_object() || !doc.contains(name)) throw ParseError(std::string("missing field '") + name + "'");
    try {
        return doc.at(name).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ParseError(std::string("invalid field '") + name + "'");
    }
}

Json pattern_probability_map(const std::map<std::vector<int>, double>& entries) {
    Json out = Json::object();
    for (const auto& [pattern, p] : entries) out[pattern_key(pattern)] = p;
    return out;
}

} // namespace

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& doc) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << std::setw(2) << doc << '\n';
}

Interferometer interferometer_from_json(const Json& doc, double unitarity_tol) {
    const auto n = field<std::size_t>(doc, "n_modes");
    const auto re = field<std::vector<std::vector<double>>>(doc, "re");
    const auto im = field<std::vector<std::vector<double>>>(doc, "im");
    if (re.size() != n) throw ParseError("field 're' must have n_modes rows");
    if (im.size() != n) throw ParseError("field 'im' must have n_modes rows");
    std::vector<Complex> entries;
    entries.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (re[i].size() != n) throw ParseError("field 're' row " + std::to_string(i) + " must have n_modes entries");
        if (im[i].size() != n) throw ParseError("field 'im' row " + std::to_string(i) + " must have n_modes entries");
        for (std::size_t j = 0; j < n; ++j) entries.emplace_back(re[i][j], im[i][j]);
    }
    return Interferometer(ComplexMatrix(n, n, std::move(entries)), unitarity_tol);
}

Json interferometer_to_json(const Interferometer& u) {
    const std::size_t n = u.n_modes();
    Json re = Json::array();
    Json im = Json::array();
    for (std::size_t i = 0; i < n; ++i) {
        Json re_row = Json::array();
        Json im_row = Json::array();
        for (std::size_t j = 0; j < n; ++j) {
            re_row.push_back(u(i, j).real());
            im_row.push_back(u(i, j).imag());
        }
        re.push_back(std::move(re_row));
        im.push_back(std::move(im_row));
    }
    return Json{{"n_modes", n}, {"re", std::move(re)}, {"im", std::move(im)}};
}

InputState StateSpec::build(std::size_t n_modes) const {
    if (type == "fock") return fock_state(n_modes, modes);
    if (type == "gbs") return gbs_state(n_modes, gbs, n_photons, max_terms);
    if (type == "disjoint_superposition") return disjoint_superposition(n_modes, modes1, modes2);
    if (type == "terms") return state_from_overlaps(n_modes, overlaps);
    throw ParseError("unknown state type '" + type + "'");
}

InputState StateSpec::build(std::size_t n_modes, std::size_t photons) const {
    if (type == "gbs") return gbs_state(n_modes, gbs, photons, max_terms);
    InputState state = build(n_modes);
    if (state.photon_number() != photons) {
        throw InvalidStateError("state of type '" + type + "' has a fixed photon number " +
                                std::to_string(state.photon_number()));
    }
    return state;
}

StateSpec state_spec_from_json(const Json& doc) {
    StateSpec spec;
    spec.type = field<std::string>(doc, "type");
    if (spec.type == "fock") {
        spec.modes = field<std::vector<int>>(doc, "modes");
    } else if (spec.type == "gbs") {
        for (const auto& pair : field<std::vector<std::vector<int>>>(doc, "pairs")) {
            if (pair.size() != 2) throw ParseError("field 'pairs' entries must be [a, b]");
            spec.gbs.pairs.emplace_back(pair[0], pair[1]);
        }
        spec.gbs.r = field<std::vector<double>>(doc, "r");
        spec.gbs.phi = doc.contains("phi") ? field<std::vector<double>>(doc, "phi")
                                           : std::vector<double>(spec.gbs.pairs.size(), 0.0);
        spec.n_photons = field<std::size_t>(doc, "n_photons");
    } else if (spec.type == "disjoint_superposition") {
        spec.modes1 = field<std::vector<int>>(doc, "modes1");
        spec.modes2 = field<std::vector<int>>(doc, "modes2");
    } else if (spec.type == "terms") {
        const auto terms = field<Json>(doc, "terms");
        if (!terms.is_array()) throw ParseError("field 'terms' must be an array");
        for (const auto& t : terms) {
            const auto m = field<std::vector<int>>(t, "modes");
            const auto re = field<double>(t, "re");
            const double im = t.contains("im") ? field<double>(t, "im") : 0.0;
            spec.overlaps.emplace_back(FockVector(m), Complex(re, im));
        }
    } else {
        throw ParseError("field 'type' must be fock, gbs, disjoint_superposition or terms");
    }
    return spec;
}

Json state_spec_to_json(const StateSpec& spec) {
    Json doc{{"type", spec.type}};
    if (spec.type == "fock") {
        doc["modes"] = spec.modes;
    } else if (spec.type == "gbs") {
        Json pairs = Json::array();
        for (auto [a, b] : spec.gbs.pairs) pairs.push_back({a, b});
        doc["pairs"] = pairs;
        doc["r"] = spec.gbs.r;
        doc["phi"] = spec.gbs.phi;
        doc["n_photons"] = spec.n_photons;
    } else if (spec.type == "disjoint_superposition") {
        doc["modes1"] = spec.modes1;
        doc["modes2"] = spec.modes2;
    } else if (spec.type == "terms") {
        Json terms = Json::array();
        for (const auto& [xi, amp] : spec.overlaps) {
            terms.push_back({{"modes", std::vector<int>(xi.modes().begin(), xi.modes().end())},
                             {"re", amp.real()},
                             {"im", amp.imag()}});
        }
        doc["terms"] = terms;
    }
    return doc;
}

Json sampler_header(const SamplerConfig& cfg, std::size_t count, std::size_t n_modes, const SamplerStats& stats) {
    Json header{{"type", "header"},
                {"seed", cfg.seed},
                {"x", cfg.distinguishability.x()},
                {"j_max", cfg.j_max ? Json(*cfg.j_max) : Json(nullptr)},
                {"loss_eta", cfg.loss_eta ? Json(*cfg.loss_eta) : Json(nullptr)},
                {"truncated", cfg.j_max.has_value()},
                {"count", count},
                {"n_modes", n_modes},
                {"clipped_weights", stats.clipped_weights},
                {"uniform_fallbacks", stats.uniform_fallbacks}};
    if (cfg.n_distribution) {
        Json dist = Json::object();
        for (auto [n, p] : *cfg.n_distribution) dist[std::to_string(n)] = p;
        header["n_distribution"] = dist;
    }
    return header;
}

void write_samples(std::ostream& out, const Json& header, const std::vector<Sample>& samples) {
    out << header.dump() << '\n';
    for (const auto& s : samples) {
        out << Json{{"modes", s.modes}, {"n_detected", s.n_detected()}}.dump() << '\n';
    }
}

SampleFile read_samples(std::istream& in) {
    SampleFile file;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        Json doc;
        try {
            doc = Json::parse(line);
        } catch (const nlohmann::json::parse_error&) {
            throw ParseError("samples line " + std::to_string(line_no) + " is not valid JSON");
        }
        if (doc.contains("type") && doc["type"] == "header") {
            file.header = std::move(doc);
            continue;
        }
        Sample s{field<std::vector<int>>(doc, "modes")};
        if (doc.contains("n_detected") && field<std::size_t>(doc, "n_detected") != s.modes.size()) {
            throw ParseError("samples line " + std::to_string(line_no) + ": field 'n_detected' disagrees with 'modes'");
        }
        file.samples.push_back(std::move(s));
    }
    return file;
}

std::string pattern_key(const std::vector<int>& modes) {
    std::ostringstream out;
    for (std::size_t i = 0; i < modes.size(); ++i) out << (i ? "," : "") << modes[i];
    return out.str();
}

std::vector<int> parse_pattern_key(const std::string& key) {
    std::vector<int> modes;
    std::istringstream in(key);
    std::string token;
    while (std::getline(in, token, ',')) {
        try {
            std::size_t used = 0;
            modes.push_back(std::stoi(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw ParseError("invalid pattern key '" + key + "'");
        }
    }
    return modes;
}

Json distribution_to_json(const oracle::FullDistribution& d, double x) {
    return Json{{"n_modes", d.n_modes},
                {"n_photons", d.photon_number},
                {"x", x},
                {"probabilities", pattern_probability_map(d.entries)}};
}

oracle::FullDistribution distribution_from_json(const Json& doc) {
    oracle::FullDistribution d;
    d.n_modes = field<std::size_t>(doc, "n_modes");
    d.photon_number = field<std::size_t>(doc, "n_photons");
    const auto probs = field<Json>(doc, "probabilities");
    if (!probs.is_object()) throw ParseError("field 'probabilities' must be an object");
    for (const auto& [key, value] : probs.items()) {
        if (!value.is_number()) throw ParseError("field 'probabilities' entry '" + key + "' must be a number");
        d.entries.emplace(parse_pattern_key(key), value.get<double>());
    }
    return d;
}

Json marginal_table_to_json(const std::map<std::vector<int>, double>& table, std::size_t k, double x,
                            std::optional<std::size_t> j_max) {
    Json rows = Json::array();
    for (const auto& [pattern, p] : table) rows.push_back({{"pattern", pattern}, {"probability", p}});
    return Json{{"k", k}, {"x", x}, {"j_max", j_max ? Json(*j_max) : Json(nullptr)}, {"table", rows}};
}

std::map<std::vector<int>, double> marginal_table_from_json(const Json& doc) {
    const auto rows = field<Json>(doc, "table");
    if (!rows.is_array()) throw ParseError("field 'table' must be an array");
    std::map<std::vector<int>, double> table;
    for (const auto& row : rows) table.emplace(field<std::vector<int>>(row, "pattern"), field<double>(row, "probability"));
    return table;
}

Json contest_to_json(const ContestResult& result) {
    return Json{{"totals", {{"a", result.log_likelihood_a}, {"b", result.log_likelihood_b}}},
                {"mean_difference", result.mean_difference},
                {"winner", std::string(to_string(result.winner))},
                {"bootstrap_ci", {result.ci_low, result.ci_high}},
                {"n_scored", {{"a", result.per_sample_a.size()}, {"b", result.per_sample_b.size()}}},
                {"excluded", {{"a", result.excluded_a}, {"b", result.excluded_b}}}};
}

} // namespace qmarg::io
