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

#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace oncoagent::eval {

/// Label orders from best to most adverse.
inline const std::vector<std::string> kCitationHierarchy{"correct", "irrelevant", "wrong"};
inline const std::vector<std::string> kStatementHierarchy{"correct", "wrong", "harmful"};
/// Citation label for a reference the rater could not assess (null in files).
inline const std::string kUnrated = "unrated";

/// Strict plurality wins; a tie among the top counts goes to the most
/// adverse tied label. Throws ArgumentError for an empty list or a label
/// outside the hierarchy.
std::string majority_vote(const std::vector<std::string>& labels, const std::vector<std::string>& hierarchy);

/// Yes/no majority; a tie counts as "no".
bool majority_yes(const std::vector<bool>& votes);

/// Citation consensus: "unrated" when more than half of the raters left the
/// item unrated, otherwise the majority over the rated labels.
std::string citation_vote(const std::vector<std::string>& labels);

/// Most frequent count; a tie goes to the smallest (`prefer_low`) or the
/// largest tied value.
std::int64_t majority_count(const std::vector<std::int64_t>& counts, bool prefer_low);

struct ToolExpectation {
    std::string tool;
    std::int64_t expected_count = 0;
    std::int64_t actual_count = 0;
};

struct SubquestionLabel {
    std::string subquestion;
    bool answered = false;
};

struct KeywordLabel {
    std::string keyword;
    bool covered = false;
};

struct RaterAnnotation {
    std::string rater_id;
    std::string case_id;
    std::vector<ToolExpectation> tool_expectations;
    std::vector<std::string> statement_labels;
    std::vector<std::string> citation_labels;
    std::vector<SubquestionLabel> helpfulness_labels;
    std::vector<KeywordLabel> completeness_keywords;
};

RaterAnnotation annotation_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RaterAnnotation& a);

/// Every `*.json` file under `dir` (sorted by path); a file holds one
/// annotation object or an array of them.
std::vector<RaterAnnotation> load_annotations(const std::filesystem::path& dir);

struct Metric {
    std::int64_t numerator = 0;
    std::int64_t denominator = 0;

    double ratio() const;
    /// Percentage with one decimal, rounded half up ("97.0"); "n/a" for an
    /// empty denominator.
    std::string percent() const;
    bool operator==(const Metric&) const = default;
};

struct Metrics {
    Metric tool_use;
    Metric completeness;
    Metric helpfulness;
    Metric correctness;
    Metric wrongness;
    Metric harmfulness;
    Metric citation_correct;
    Metric citation_irrelevant;
    Metric citation_wrong;
    Metric citation_unrated;
    bool operator==(const Metrics&) const = default;
};

struct MajorityTool {
    std::string tool;
    std::int64_t expected_count = 0;
    std::int64_t actual_count = 0;
    bool operator==(const MajorityTool&) const = default;
};

struct CaseReport {
    std::string case_id;
    std::vector<std::string> raters; // sorted
    Metrics metrics;
    std::vector<MajorityTool> tools;
    std::vector<std::string> statements;
    std::vector<std::string> citations;
    std::vector<SubquestionLabel> helpfulness;
    std::vector<KeywordLabel> completeness;
};

struct MetricsReport {
    Metrics totals;
    std::vector<CaseReport> cases; // sorted by case id
};

/// Majority labels per item first, then counts summed over cases. Tool use
/// is sum(min(actual, expected)) over sum(expected), where expected takes
/// the larger and actual the smaller count on a tie. Throws IntegrityError
/// when raters of a case disagree on the item lists (naming case and item
/// index), on duplicate raters, and ArgumentError on empty input or labels
/// outside the hierarchies.
MetricsReport compute_metrics(const std::vector<RaterAnnotation>& annotations);

nlohmann::json to_json(const Metric& m);
nlohmann::json to_json(const MetricsReport& r);
/// Fixed-width text table of the totals.
std::string render_table(const MetricsReport& r);

struct Keyword {
    std::string keyword;
    std::vector<std::string> synonyms;
};

/// Case-insensitive containment of the keyword or any synonym.
std::vector<KeywordLabel> completeness_check(const std::string& response_text, const std::vector<Keyword>& keywords);

} // namespace oncoagent::eval
