/*
 * Copyright 2026 The OncoAgent Authors.
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

#include "oncoagent/common/error.hpp"
#include "oncoagent/common/fs.hpp"
#include "oncoagent/eval/eval.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>

namespace ev = oncoagent::eval;
using oncoagent::ArgumentError;
using oncoagent::IntegrityError;

namespace {

const std::filesystem::path kAnnotations = std::filesystem::path(ONCOAGENT_FIXTURE_DIR) / "eval" / "annotations";

// Brute force: scan labels from most adverse to best, take the first with
// the maximal count.
std::string oracle_vote(const std::vector<std::string>& labels, const std::vector<std::string>& hierarchy) {
    std::size_t best = 0;
    for (const auto& h : hierarchy) best = std::max<std::size_t>(best, std::count(labels.begin(), labels.end(), h));
    for (auto it = hierarchy.rbegin(); it != hierarchy.rend(); ++it) {
        if (static_cast<std::size_t>(std::count(labels.begin(), labels.end(), *it)) == best) return *it;
    }
    return {};
}

ev::RaterAnnotation rater(const std::string& id, const std::string& case_id, std::vector<std::string> statements,
                          std::vector<std::string> citations) {
    ev::RaterAnnotation a;
    a.rater_id = id;
    a.case_id = case_id;
    a.statement_labels = std::move(statements);
    a.citation_labels = std::move(citations);
    a.tool_expectations = {{"medsam", 2, 2}, {"oncokb", 1, 0}};
    a.helpfulness_labels = {{"Next therapy?", true}, {"Progression?", false}};
    a.completeness_keywords = {{"FOLFOX", true}};
    return a;
}

} // namespace

TEST(MajorityVote, Examples) {
    EXPECT_EQ(ev::majority_vote({"correct", "correct", "correct", "wrong"}, ev::kCitationHierarchy), "correct");
    EXPECT_EQ(ev::majority_vote({"correct", "correct", "irrelevant", "irrelevant"}, ev::kCitationHierarchy),
              "irrelevant");
    EXPECT_EQ(ev::majority_vote({"correct", "irrelevant", "wrong", "wrong"}, ev::kCitationHierarchy), "wrong");
    EXPECT_EQ(ev::majority_vote({"correct", "correct", "wrong", "harmful"}, ev::kStatementHierarchy), "correct");
    EXPECT_EQ(ev::majority_vote({"wrong", "wrong", "harmful", "harmful"}, ev::kStatementHierarchy), "harmful");
}

TEST(MajorityVote, RejectsUnknownOrEmpty) {
    EXPECT_THROW(ev::majority_vote({"correct", "maybe"}, ev::kCitationHierarchy), ArgumentError);
    EXPECT_THROW(ev::majority_vote({"harmful"}, ev::kCitationHierarchy), ArgumentError);
    EXPECT_THROW(ev::majority_vote({}, ev::kCitationHierarchy), ArgumentError);
}

TEST(MajorityVote, ExhaustiveFourLabelEnumeration) {
    for (const auto* hierarchy : {&ev::kCitationHierarchy, &ev::kStatementHierarchy}) {
        const auto& h = *hierarchy;
        int checked = 0;
        for (int code = 0; code < 81; ++code) {
            std::vector<std::string> labels;
            for (int c = code, i = 0; i < 4; ++i, c /= 3) labels.push_back(h[static_cast<std::size_t>(c % 3)]);
            auto expected = oracle_vote(labels, h);
            auto perm = labels;
            std::sort(perm.begin(), perm.end());
            do {
                ASSERT_EQ(ev::majority_vote(perm, h), expected);
            } while (std::next_permutation(perm.begin(), perm.end()));
            ++checked;
        }
        EXPECT_EQ(checked, 81);
        for (const auto& l : h) EXPECT_EQ(ev::majority_vote({l, l, l, l}, h), l);
        // Every two-two split goes to the more adverse label.
        for (std::size_t i = 0; i < h.size(); ++i) {
            for (std::size_t j = i + 1; j < h.size(); ++j) {
                EXPECT_EQ(ev::majority_vote({h[i], h[i], h[j], h[j]}, h), h[j]);
            }
        }
    }
}

TEST(MajorityVote, BooleanTieIsNo) {
    EXPECT_TRUE(ev::majority_yes({true, true, true, false}));
    EXPECT_FALSE(ev::majority_yes({true, true, false, false}));
    EXPECT_FALSE(ev::majority_yes({}));
    EXPECT_TRUE(ev::majority_yes({true}));
}

TEST(MajorityVote, CountTies) {
    EXPECT_EQ(ev::majority_count({1, 1, 2, 2}, true), 1);
    EXPECT_EQ(ev::majority_count({1, 1, 2, 2}, false), 2);
    EXPECT_EQ(ev::majority_count({3, 3, 3, 0}, true), 3);
    EXPECT_THROW(ev::majority_count({}, true), ArgumentError);
}

TEST(MajorityVote, CitationUnrated) {
    EXPECT_EQ(ev::citation_vote({ev::kUnrated, ev::kUnrated, ev::kUnrated, "correct"}), ev::kUnrated);
    EXPECT_EQ(ev::citation_vote({ev::kUnrated, ev::kUnrated, "correct", "correct"}), "correct");
    EXPECT_EQ(ev::citation_vote({ev::kUnrated, "wrong", "correct", "correct"}), "correct");
    EXPECT_EQ(ev::citation_vote({ev::kUnrated, ev::kUnrated, "wrong", "correct"}), "wrong");
}

TEST(Metric, PercentRoundsHalfUp) {
    EXPECT_EQ((ev::Metric{141, 171}.percent()), "82.5");
    EXPECT_EQ((ev::Metric{32, 33}.percent()), "97.0");
    EXPECT_EQ((ev::Metric{1, 8}.percent()), "12.5");
    EXPECT_EQ((ev::Metric{1, 16}.percent()), "6.3");
    EXPECT_EQ((ev::Metric{0, 5}.percent()), "0.0");
    EXPECT_EQ((ev::Metric{5, 5}.percent()), "100.0");
    EXPECT_EQ((ev::Metric{0, 0}.percent()), "n/a");
}

TEST(Metric, PercentMatchesIntervalOracle) {
    for (std::int64_t den = 1; den <= 250; ++den) {
        for (std::int64_t num = 0; num <= den; ++num) {
            auto text = ev::Metric{num, den}.percent();
            auto dot = text.find('.');
            ASSERT_NE(dot, std::string::npos);
            ASSERT_EQ(text.size(), dot + 2);
            std::int64_t t = std::stoll(text.substr(0, dot)) * 10 + (text[dot + 1] - '0');
            // t/10 % is the nearest tenth with halves rounded up.
            ASSERT_GE(2000 * num, (2 * t - 1) * den) << num << "/" << den;
            ASSERT_LT(2000 * num, (2 * t + 1) * den) << num << "/" << den;
        }
    }
}

TEST(ComputeMetrics, PackagedFixtureTotals) {
    auto annotations = ev::load_annotations(kAnnotations);
    ASSERT_EQ(annotations.size(), 44u);
    auto report = ev::compute_metrics(annotations);
    const auto& t = report.totals;
    EXPECT_EQ(t.tool_use, (ev::Metric{32, 33}));
    EXPECT_EQ(t.completeness, (ev::Metric{63, 67}));
    EXPECT_EQ(t.helpfulness, (ev::Metric{33, 37}));
    EXPECT_EQ(t.correctness, (ev::Metric{131, 140}));
    EXPECT_EQ(t.wrongness, (ev::Metric{6, 140}));
    EXPECT_EQ(t.harmfulness, (ev::Metric{3, 140}));
    EXPECT_EQ(t.citation_correct, (ev::Metric{141, 171}));
    EXPECT_EQ(t.citation_irrelevant, (ev::Metric{11, 171}));
    EXPECT_EQ(t.citation_wrong, (ev::Metric{3, 171}));
    EXPECT_EQ(t.citation_unrated, (ev::Metric{16, 171}));

    EXPECT_EQ(t.tool_use.percent(), "97.0");
    EXPECT_EQ(t.completeness.percent(), "94.0");
    EXPECT_EQ(t.helpfulness.percent(), "89.2");
    EXPECT_EQ(t.correctness.percent(), "93.6");
    EXPECT_EQ(t.wrongness.percent(), "4.3");
    EXPECT_EQ(t.harmfulness.percent(), "2.1");
    EXPECT_EQ(t.citation_correct.percent(), "82.5");

    ASSERT_EQ(report.cases.size(), 11u);
    for (const auto& c : report.cases) EXPECT_EQ(c.raters.size(), 4u) << c.case_id;

    // Case Le: PubMed anticipated but never executed.
    auto le = std::find_if(report.cases.begin(), report.cases.end(), [](const auto& c) { return c.case_id == "Le"; });
    ASSERT_NE(le, report.cases.end());
    auto pubmed = std::find_if(le->tools.begin(), le->tools.end(), [](const auto& m) { return m.tool == "pubmed"; });
    ASSERT_NE(pubmed, le->tools.end());
    EXPECT_EQ(pubmed->expected_count, 1);
    EXPECT_EQ(pubmed->actual_count, 0);

    auto table = ev::render_table(report);
    EXPECT_NE(table.find("82.5%"), std::string::npos);
    EXPECT_NE(table.find("32/33"), std::string::npos);
}

TEST(ComputeMetrics, PartitionHoldsOnRandomAnnotations) {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<ev::RaterAnnotation> all;
        int cases = 1 + static_cast<int>(rng() % 4);
        for (int c = 0; c < cases; ++c) {
            std::size_t ns = rng() % 8;
            std::size_t nc = rng() % 8;
            int raters = 1 + static_cast<int>(rng() % 4);
            for (int r = 0; r < raters; ++r) {
                std::vector<std::string> s;
                std::vector<std::string> ci;
                for (std::size_t i = 0; i < ns; ++i) s.push_back(ev::kStatementHierarchy[rng() % 3]);
                for (std::size_t i = 0; i < nc; ++i) {
                    auto k = rng() % 4;
                    ci.push_back(k == 3 ? ev::kUnrated : ev::kCitationHierarchy[k]);
                }
                all.push_back(rater("r" + std::to_string(r), "c" + std::to_string(c), s, ci));
            }
        }
        auto t = ev::compute_metrics(all).totals;
        ASSERT_EQ(t.correctness.numerator + t.wrongness.numerator + t.harmfulness.numerator, t.correctness.denominator);
        ASSERT_EQ(t.citation_correct.numerator + t.citation_irrelevant.numerator + t.citation_wrong.numerator +
                      t.citation_unrated.numerator,
                  t.citation_correct.denominator);
        ASSERT_LE(t.tool_use.numerator, t.tool_use.denominator);
    }
}

TEST(ComputeMetrics, SingleRaterGivesRawCounts) {
    auto a = rater("r1", "A", {"correct", "wrong", "harmful", "correct"}, {"correct", "irrelevant"});
    auto t = ev::compute_metrics({a}).totals;
    EXPECT_EQ(t.correctness, (ev::Metric{2, 4}));
    EXPECT_EQ(t.wrongness, (ev::Metric{1, 4}));
    EXPECT_EQ(t.harmfulness, (ev::Metric{1, 4}));
    EXPECT_EQ(t.citation_irrelevant, (ev::Metric{1, 2}));
    EXPECT_EQ(t.tool_use, (ev::Metric{2, 3}));
    EXPECT_EQ(t.helpfulness, (ev::Metric{1, 2}));
    EXPECT_EQ(t.completeness, (ev::Metric{1, 1}));
}

TEST(ComputeMetrics, InputOrderDoesNotMatter) {
    auto annotations = ev::load_annotations(kAnnotations);
    auto expected = ev::to_json(ev::compute_metrics(annotations)).dump();
    std::mt19937 rng(11);
    for (int i = 0; i < 5; ++i) {
        std::shuffle(annotations.begin(), annotations.end(), rng);
        for (auto& a : annotations) std::shuffle(a.tool_expectations.begin(), a.tool_expectations.end(), rng);
        EXPECT_EQ(ev::to_json(ev::compute_metrics(annotations)).dump(), expected);
    }
}

TEST(ComputeMetrics, MismatchedItemsNameCaseAndIndex) {
    auto a = rater("r1", "W", {"correct", "correct", "wrong"}, {"correct"});
    auto b = rater("r2", "W", {"correct", "correct"}, {"correct"});
    try {
        ev::compute_metrics({a, b});
        FAIL() << "expected IntegrityError";
    } catch (const IntegrityError& e) {
        std::string what = e.what();
        EXPECT_NE(what.find("case W"), std::string::npos) << what;
        EXPECT_NE(what.find("statement item 2"), std::string::npos) << what;
    }

    auto c = rater("r2", "W", {"correct", "correct", "wrong"}, {"correct"});
    c.helpfulness_labels[1].subquestion = "Other question?";
    EXPECT_THROW(ev::compute_metrics({a, c}), IntegrityError);

    auto d = rater("r2", "W", {"correct", "correct", "wrong"}, {"correct"});
    d.tool_expectations[0].tool = "gpt4v";
    EXPECT_THROW(ev::compute_metrics({a, d}), IntegrityError);

    EXPECT_THROW(ev::compute_metrics({a, a}), IntegrityError);
    EXPECT_THROW(ev::compute_metrics({}), ArgumentError);

    auto e = rater("r2", "W", {"correct", "correct", "unsure"}, {"correct"});
    EXPECT_THROW(ev::compute_metrics({a, e}), ArgumentError);
}

TEST(Annotations, JsonRoundTripKeepsUnrated) {
    auto a = rater("r3", "X", {"correct"}, {"correct", ev::kUnrated});
    auto j = ev::to_json(a);
    EXPECT_TRUE(j["citation_labels"][1].is_null());
    EXPECT_EQ(ev::to_json(ev::annotation_from_json(j)), j);
}

TEST(Annotations, LoadErrors) {
    EXPECT_THROW(ev::load_annotations("/nonexistent/annotations"), oncoagent::IoError);
    auto dir = std::filesystem::temp_directory_path() / "oncoagent_eval_bad";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    oncoagent::fs::write_file_atomic(dir / "a.json", "{\"rater_id\": ");
    EXPECT_THROW(ev::load_annotations(dir), oncoagent::ParseError);
    oncoagent::fs::write_file_atomic(dir / "a.json", "[{\"rater_id\": \"r1\"}]");
    EXPECT_THROW(ev::load_annotations(dir), ArgumentError);
    std::filesystem::remove_all(dir);
}

TEST(CompletenessCheck, Examples) {
    std::string response = "Given progression, start FOLFOX and Bevacizumab as first-line therapy.";
    auto labels = ev::completeness_check(response, {{"FOLFOX and bevacizumab", {}},
                                                    {"pembrolizumab", {}},
                                                    {"anti-VEGF antibody", {"bevacizumab", "aflibercept"}}});
    ASSERT_EQ(labels.size(), 3u);
    EXPECT_TRUE(labels[0].covered);
    EXPECT_FALSE(labels[1].covered);
    EXPECT_TRUE(labels[2].covered);
    EXPECT_EQ(labels[2].keyword, "anti-VEGF antibody");
}
