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


#include <gtest/gtest.h>

#include <sstream>

#include "qmarg/errors.hpp"
#include "qmarg/io.hpp"
#include "test_support.hpp"

namespace qmarg {
namespace {

using io::Json;

TEST(IoUnitary, RoundTripIsExact) {
    const auto u = Interferometer::haar_random(5, 70);
    const auto back = io::interferometer_from_json(Json::parse(io::interferometer_to_json(u).dump()));
    EXPECT_EQ(back.matrix(), u.matrix());
}

TEST(IoUnitary, RejectsNonUnitaryAndBadShapes) {
    Json doc = io::interferometer_to_json(Interferometer::haar_random(3, 71));
    doc["re"][0][0] = 5.0;
    try {
        io::interferometer_from_json(doc);
        FAIL() << "expected UnitarityError";
    } catch (const UnitarityError& e) {
        EXPECT_NE(std::string(e.what()).find("unitarity violated"), std::string::npos);
    }
    Json short_rows = io::interferometer_to_json(Interferometer::haar_random(3, 72));
    short_rows["im"].erase(0);
    EXPECT_THROW(io::interferometer_from_json(short_rows), ParseError);
    EXPECT_THROW(io::interferometer_from_json(Json{{"n_modes", 2}}), ParseError);
    EXPECT_THROW(io::interferometer_from_json(Json{{"n_modes", "two"}, {"re", 1}, {"im", 1}}), ParseError);
}

TEST(IoStateSpec, RoundTripsEveryType) {
    const std::vector<Json> docs{
        Json::parse(R"({"type": "fock", "modes": [0, 2, 4]})"),
        Json::parse(R"({"type": "gbs", "pairs": [[0, 1], [2, 3]], "r": [0.6, 0.9], "phi": [0.3, 1.1], "n_photons": 4})"),
        Json::parse(R"({"type": "disjoint_superposition", "modes1": [0, 1], "modes2": [2, 3]})"),
        Json::parse(R"({"type": "terms", "terms": [{"modes": [0, 1], "re": 0.6, "im": 0.0}, {"modes": [2, 2], "re": 0.0, "im": 0.8}]})"),
    };
    for (const auto& doc : docs) {
        const auto spec = io::state_spec_from_json(doc);
        const auto again = io::state_spec_from_json(io::state_spec_to_json(spec));
        const auto a = spec.build(6);
        const auto b = again.build(6);
        ASSERT_EQ(a.terms().size(), b.terms().size()) << doc.dump();
        for (std::size_t i = 0; i < a.terms().size(); ++i) {
            EXPECT_EQ(a.terms()[i].xi, b.terms()[i].xi);
            EXPECT_EQ(a.terms()[i].amplitude, b.terms()[i].amplitude);
        }
    }
}

TEST(IoStateSpec, GbsRebuildsAtOtherPhotonNumbers) {
    const auto spec = io::state_spec_from_json(
        Json::parse(R"({"type": "gbs", "pairs": [[0, 1], [2, 3]], "r": [0.5, 0.5], "n_photons": 2})"));
    EXPECT_EQ(spec.build(4, 4).photon_number(), 4u);
    const auto fock = io::state_spec_from_json(Json::parse(R"({"type": "fock", "modes": [0, 1]})"));
    EXPECT_THROW(fock.build(4, 3), InvalidStateError);
}

TEST(IoStateSpec, ErrorsNameTheField) {
    try {
        io::state_spec_from_json(Json::parse(R"({"type": "gbs", "pairs": [[0, 1]], "n_photons": 2})"));
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("'r'"), std::string::npos);
    }
    EXPECT_THROW(io::state_spec_from_json(Json::parse(R"({"type": "laser"})")), ParseError);
    EXPECT_THROW(io::state_spec_from_json(Json::parse(R"({"type": "fock", "modes": "0,1"})")), ParseError);
}

TEST(IoSamples, RoundTrip) {
    SamplerConfig cfg;
    cfg.seed = 11;
    cfg.j_max = 2;
    const std::vector<Sample> samples{{{0, 3, 3}}, {{}}, {{5}}};
    std::stringstream buffer;
    io::write_samples(buffer, io::sampler_header(cfg, samples.size(), 6, {}), samples);
    const auto file = io::read_samples(buffer);
    EXPECT_EQ(file.samples, samples);
    EXPECT_EQ(file.header["seed"], 11);
    EXPECT_EQ(file.header["j_max"], 2);
    EXPECT_TRUE(file.header["truncated"].get<bool>());
}

TEST(IoSamples, RejectsMalformedLines) {
    std::stringstream bad_json("{\"modes\": [0, 1]\n{oops\n");
    EXPECT_THROW(io::read_samples(bad_json), ParseError);
    std::stringstream mismatch("{\"modes\": [0, 1], \"n_detected\": 3}\n");
    EXPECT_THROW(io::read_samples(mismatch), ParseError);
}

TEST(IoPatternKey, RoundTripAndErrors) {
    const std::vector<int> modes{0, 4, 4, 7};
    EXPECT_EQ(io::pattern_key(modes), "0,4,4,7");
    EXPECT_EQ(io::parse_pattern_key("0,4,4,7"), modes);
    EXPECT_THROW(io::parse_pattern_key("0,x"), ParseError);
    EXPECT_THROW(io::parse_pattern_key("1.5"), ParseError);
}

TEST(IoDistribution, RoundTrip) {
    oracle::FullDistribution d;
    d.n_modes = 3;
    d.photon_number = 2;
    d.entries = {{{0, 0}, 0.1}, {{0, 2}, 0.7}, {{1, 2}, 0.2}};
    const auto back = io::distribution_from_json(Json::parse(io::distribution_to_json(d, 0.5).dump()));
    EXPECT_EQ(back.entries, d.entries);
    EXPECT_EQ(back.n_modes, 3u);
}

TEST(IoMarginalTable, RoundTrip) {
    const std::map<std::vector<int>, double> table{{{0, 1}, 0.25}, {{1, 2}, 1.0 / 3.0}};
    const auto doc = io::marginal_table_to_json(table, 2, 1.0, std::nullopt);
    EXPECT_TRUE(doc["j_max"].is_null());
    EXPECT_EQ(io::marginal_table_from_json(Json::parse(doc.dump())), table);
    EXPECT_THROW(io::marginal_table_from_json(Json{{"table", 3}}), ParseError);
}

TEST(IoContest, ReportFields) {
    ContestResult r;
    r.log_likelihood_a = -10.0;
    r.log_likelihood_b = -12.0;
    r.ci_low = 0.1;
    r.ci_high = 0.3;
    r.winner = Winner::a;
    const auto doc = io::contest_to_json(r);
    EXPECT_EQ(doc["winner"], "A");
    EXPECT_EQ(doc["totals"]["b"], -12.0);
    EXPECT_EQ(doc["bootstrap_ci"][1], 0.3);
}

} // namespace
} // namespace qmarg
