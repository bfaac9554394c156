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

#include "oncoagent/eval/eval.hpp"

#include "oncoagent/common/error.hpp"
#include "oncoagent/common/fs.hpp"
#include "oncoagent/common/text.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <iomanip>

namespace oncoagent::eval {

using nlohmann::json;

std::string majority_vote(const std::vector<std::string>& labels, const std::vector<std::string>& hierarchy) {
    if (labels.empty()) throw ArgumentError("majority_vote needs at least one label");
    std::vector<int> counts(hierarchy.size(), 0);
    for (const auto& label : labels) {
        auto it = std::find(hierarchy.begin(), hierarchy.end(), label);
        if (it == hierarchy.end()) {
            throw ArgumentError("label '" + label + "' is not one of: " + text::join(hierarchy, ", "));
        }
        ++counts[static_cast<std::size_t>(it - hierarchy.begin())];
    }
    int best = *std::max_element(counts.begin(), counts.end());
    for (std::size_t i = hierarchy.size(); i-- > 0;) {
        if (counts[i] == best) return hierarchy[i];
    }
    return hierarchy.back();
}

std::string citation_vote(const std::vector<std::string>& labels) {
    std::vector<std::string> rated;
    for (const auto& l : labels) {
        if (l != kUnrated) rated.push_back(l);
    }
    if (labels.empty()) throw ArgumentError("citation_vote needs at least one label");
    if ((labels.size() - rated.size()) * 2 > labels.size()) return kUnrated;
    return majority_vote(rated, kCitationHierarchy);
}

bool majority_yes(const std::vector<bool>& votes) {
    auto yes = std::count(votes.begin(), votes.end(), true);
    return yes * 2 > static_cast<long>(votes.size());
}

std::int64_t majority_count(const std::vector<std::int64_t>& counts, bool prefer_low) {
    if (counts.empty()) throw ArgumentError("majority_count needs at least one value");
    std::map<std::int64_t, int> freq;
    for (auto c : counts) ++freq[c];
    int best = 0;
    for (const auto& [v, f] : freq) best = std::max(best, f);
    std::vector<std::int64_t> tied;
    for (const auto& [v, f] : freq) {
        if (f == best) tied.push_back(v);
    }
    return prefer_low ? tied.front() : tied.back();
}

// ---------------------------------------------------------------- io

RaterAnnotation annotation_from_json(const json& j) {
    RaterAnnotation a;
    a.rater_id = j.at("rater_id").get<std::string>();
    a.case_id = j.at("case_id").get<std::string>();
    for (const auto& t : j.value("tool_expectations", json::array())) {
        a.tool_expectations.push_back(
            {t.at("tool").get<std::string>(), t.at("expected_count").get<std::int64_t>(), t.at("actual_count").get<std::int64_t>()});
    }
    a.statement_labels = j.value("statement_labels", std::vector<std::string>{});
    for (const auto& c : j.value("citation_labels", json::array())) {
        a.citation_labels.push_back(c.is_null() ? kUnrated : c.get<std::string>());
    }
    for (const auto& h : j.value("helpfulness_labels", json::array())) {
        a.helpfulness_labels.push_back({h.at("subquestion").get<std::string>(), h.at("answered").get<bool>()});
    }
    for (const auto& k : j.value("completeness_keywords", json::array())) {
        a.completeness_keywords.push_back({k.at("keyword").get<std::string>(), k.at("covered").get<bool>()});
    }
    return a;
}

json to_json(const RaterAnnotation& a) {
    json tools = json::array();
    for (const auto& t : a.tool_expectations) {
        tools.push_back({{"tool", t.tool}, {"expected_count", t.expected_count}, {"actual_count", t.actual_count}});
    }
    json help = json::array();
    for (const auto& h : a.helpfulness_labels) help.push_back({{"subquestion", h.subquestion}, {"answered", h.answered}});
    json kw = json::array();
    for (const auto& k : a.completeness_keywords) kw.push_back({{"keyword", k.keyword}, {"covered", k.covered}});
    json citations = json::array();
    for (const auto& c : a.citation_labels) citations.push_back(c == kUnrated ? json() : json(c));
    return {{"rater_id", a.rater_id},
            {"case_id", a.case_id},
            {"tool_expectations", tools},
            {"statement_labels", a.statement_labels},
            {"citation_labels", citations},
            {"helpfulness_labels", help},
            {"completeness_keywords", kw}};
}

std::vector<RaterAnnotation> load_annotations(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<RaterAnnotation> out;
    for (const auto& f : files) {
        json j;
        try {
            j = json::parse(fs::read_file(f));
        } catch (const json::parse_error& e) {
            throw ParseError(f.string() + ": " + e.what(), e.byte);
        }
        try {
            if (j.is_array()) {
                for (const auto& a : j) out.push_back(annotation_from_json(a));
            } else {
                out.push_back(annotation_from_json(j));
            }
        } catch (const json::exception& e) {
            throw ArgumentError(f.string() + ": " + e.what());
        }
    }
    return out;
}

// ---------------------------------------------------------------- metrics

double Metric::ratio() const {
    return denominator == 0 ? 0.0 : static_cast<double>(numerator) / static_cast<double>(denominator);
}

std::string Metric::percent() const {
    if (denominator <= 0) return "n/a";
    std::int64_t tenths = (numerator * 2000 + denominator) / (2 * denominator);
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

namespace {

void add(Metrics& into, const Metrics& m) {
    auto sum = [](Metric& a, const Metric& b) {
        a.numerator += b.numerator;
        a.denominator += b.denominator;
    };
    sum(into.tool_use, m.tool_use);
    sum(into.completeness, m.completeness);
    sum(into.helpfulness, m.helpfulness);
    sum(into.correctness, m.correctness);
    sum(into.wrongness, m.wrongness);
    sum(into.harmfulness, m.harmfulness);
    sum(into.citation_correct, m.citation_correct);
    sum(into.citation_irrelevant, m.citation_irrelevant);
    sum(into.citation_wrong, m.citation_wrong);
    sum(into.citation_unrated, m.citation_unrated);
}

[[noreturn]] void mismatch(const std::string& case_id, const std::string& what, std::size_t index,
                           const RaterAnnotation& ref, const RaterAnnotation& other) {
    throw IntegrityError("case " + case_id + ": " + what + " item " + std::to_string(index) + " differs between raters " +
                         ref.rater_id + " and " + other.rater_id);
}

template <typename T, typename Same>
void check_items(const std::string& case_id, const std::string& what, const std::vector<const RaterAnnotation*>& raters,
                 const std::function<const std::vector<T>&(const RaterAnnotation&)>& items, Same same) {
    const auto& ref = items(*raters.front());
    for (const auto* r : raters) {
        const auto& other = items(*r);
        auto n = std::min(ref.size(), other.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!same(ref[i], other[i])) mismatch(case_id, what, i, *raters.front(), *r);
        }
        if (ref.size() != other.size()) mismatch(case_id, what, n, *raters.front(), *r);
    }
}

CaseReport evaluate_case(const std::string& case_id, std::vector<const RaterAnnotation*> raters) {
    std::sort(raters.begin(), raters.end(), [](auto* a, auto* b) { return a->rater_id < b->rater_id; });
    CaseReport report;
    report.case_id = case_id;
    for (std::size_t i = 0; i < raters.size(); ++i) {
        if (i && raters[i]->rater_id == raters[i - 1]->rater_id) {
            throw IntegrityError("case " + case_id + ": rater " + raters[i]->rater_id + " appears twice");
        }
        report.raters.push_back(raters[i]->rater_id);
    }

    auto any = [](const auto&, const auto&) { return true; };
    check_items<std::string>(case_id, "statement", raters,
                             [](const RaterAnnotation& a) -> const std::vector<std::string>& { return a.statement_labels; },
                             any);
    check_items<std::string>(case_id, "citation", raters,
                             [](const RaterAnnotation& a) -> const std::vector<std::string>& { return a.citation_labels; },
                             any);
    check_items<SubquestionLabel>(
        case_id, "helpfulness", raters,
        [](const RaterAnnotation& a) -> const std::vector<SubquestionLabel>& { return a.helpfulness_labels; },
        [](const SubquestionLabel& x, const SubquestionLabel& y) { return x.subquestion == y.subquestion; });
    check_items<KeywordLabel>(
        case_id, "keyword", raters,
        [](const RaterAnnotation& a) -> const std::vector<KeywordLabel>& { return a.completeness_keywords; },
        [](const KeywordLabel& x, const KeywordLabel& y) { return x.keyword == y.keyword; });

    // Tools are matched by name, independent of listing order.
    std::vector<std::map<std::string, const ToolExpectation*>> tool_maps;
    for (const auto* r : raters) {
        std::map<std::string, const ToolExpectation*> m;
        for (const auto& t : r->tool_expectations) {
            if (t.expected_count < 0 || t.actual_count < 0) {
                throw ArgumentError("case " + case_id + ": negative tool count for " + t.tool);
            }
            if (!m.emplace(t.tool, &t).second) {
                throw IntegrityError("case " + case_id + ": rater " + r->rater_id + " lists tool " + t.tool + " twice");
            }
        }
        tool_maps.push_back(std::move(m));
    }
    for (std::size_t r = 1; r < tool_maps.size(); ++r) {
        auto a = tool_maps.front().begin();
        auto b = tool_maps[r].begin();
        for (std::size_t i = 0;; ++i, ++a, ++b) {
            bool a_end = a == tool_maps.front().end();
            bool b_end = b == tool_maps[r].end();
            if (a_end && b_end) break;
            if (a_end || b_end || a->first != b->first) mismatch(case_id, "tool", i, *raters.front(), *raters[r]);
        }
    }

    auto& m = report.metrics;
    for (const auto& [tool, first] : tool_maps.front()) {
        std::vector<std::int64_t> expected;
        std::vector<std::int64_t> actual;
        for (const auto& tm : tool_maps) {
            expected.push_back(tm.at(tool)->expected_count);
            actual.push_back(tm.at(tool)->actual_count);
        }
        MajorityTool mt{tool, majority_count(expected, false), majority_count(actual, true)};
        m.tool_use.numerator += std::min(mt.expected_count, mt.actual_count);
        m.tool_use.denominator += mt.expected_count;
        report.tools.push_back(mt);
    }

    const auto& ref = *raters.front();
    for (std::size_t i = 0; i < ref.statement_labels.size(); ++i) {
        std::vector<std::string> votes;
        for (const auto* r : raters) votes.push_back(r->statement_labels[i]);
        auto label = majority_vote(votes, kStatementHierarchy);
        report.statements.push_back(label);
        m.correctness.numerator += label == "correct";
        m.wrongness.numerator += label == "wrong";
        m.harmfulness.numerator += label == "harmful";
    }
    auto statements = static_cast<std::int64_t>(ref.statement_labels.size());
    m.correctness.denominator = m.wrongness.denominator = m.harmfulness.denominator = statements;

    for (std::size_t i = 0; i < ref.citation_labels.size(); ++i) {
        std::vector<std::string> votes;
        for (const auto* r : raters) votes.push_back(r->citation_labels[i]);
        auto label = citation_vote(votes);
        report.citations.push_back(label);
        m.citation_correct.numerator += label == "correct";
        m.citation_irrelevant.numerator += label == "irrelevant";
        m.citation_wrong.numerator += label == "wrong";
        m.citation_unrated.numerator += label == kUnrated;
    }
    auto citations = static_cast<std::int64_t>(ref.citation_labels.size());
    m.citation_correct.denominator = m.citation_irrelevant.denominator = m.citation_wrong.denominator =
        m.citation_unrated.denominator = citations;

    for (std::size_t i = 0; i < ref.helpfulness_labels.size(); ++i) {
        std::vector<bool> votes;
        for (const auto* r : raters) votes.push_back(r->helpfulness_labels[i].answered);
        bool yes = majority_yes(votes);
        report.helpfulness.push_back({ref.helpfulness_labels[i].subquestion, yes});
        m.helpfulness.numerator += yes;
    }
    m.helpfulness.denominator = static_cast<std::int64_t>(ref.helpfulness_labels.size());

    for (std::size_t i = 0; i < ref.completeness_keywords.size(); ++i) {
        std::vector<bool> votes;
        for (const auto* r : raters) votes.push_back(r->completeness_keywords[i].covered);
        bool yes = majority_yes(votes);
        report.completeness.push_back({ref.completeness_keywords[i].keyword, yes});
        m.completeness.numerator += yes;
    }
    m.completeness.denominator = static_cast<std::int64_t>(ref.completeness_keywords.size());
    return report;
}

} // namespace

MetricsReport compute_metrics(const std::vector<RaterAnnotation>& annotations) {
    if (annotations.empty()) throw ArgumentError("compute_metrics needs at least one annotation");
    std::map<std::string, std::vector<const RaterAnnotation*>> by_case;
    for (const auto& a : annotations) by_case[a.case_id].push_back(&a);
    MetricsReport report;
    for (const auto& [case_id, raters] : by_case) {
        report.cases.push_back(evaluate_case(case_id, raters));
        add(report.totals, report.cases.back().metrics);
    }
    const auto& t = report.totals;
    if (t.correctness.numerator + t.wrongness.numerator + t.harmfulness.numerator != t.correctness.denominator ||
        t.citation_correct.numerator + t.citation_irrelevant.numerator + t.citation_wrong.numerator +
                t.citation_unrated.numerator !=
            t.citation_correct.denominator) {
        throw IntegrityError("label partition does not sum to the item totals");
    }
    return report;
}

json to_json(const Metric& m) {
    return {{"numerator", m.numerator}, {"denominator", m.denominator}, {"ratio", m.ratio()}, {"percent", m.percent()}};
}

namespace {

const std::vector<std::pair<const char*, Metric Metrics::*>>& metric_fields() {
    static const std::vector<std::pair<const char*, Metric Metrics::*>> fields{
        {"tool_use", &Metrics::tool_use},
        {"completeness", &Metrics::completeness},
        {"helpfulness", &Metrics::helpfulness},
        {"correctness", &Metrics::correctness},
        {"wrongness", &Metrics::wrongness},
        {"harmfulness", &Metrics::harmfulness},
        {"citation_correct", &Metrics::citation_correct},
        {"citation_irrelevant", &Metrics::citation_irrelevant},
        {"citation_wrong", &Metrics::citation_wrong},
        {"citation_unrated", &Metrics::citation_unrated}};
    return fields;
}

json metrics_json(const Metrics& m) {
    json out = json::object();
    for (const auto& [name, field] : metric_fields()) out[name] = to_json(m.*field);
    return out;
}

} // namespace

json to_json(const MetricsReport& r) {
    json cases = json::array();
    for (const auto& c : r.cases) {
        json tools = json::array();
        for (const auto& t : c.tools) {
            tools.push_back({{"tool", t.tool}, {"expected_count", t.expected_count}, {"actual_count", t.actual_count}});
        }
        json help = json::array();
        for (const auto& h : c.helpfulness) help.push_back({{"subquestion", h.subquestion}, {"answered", h.answered}});
        json kw = json::array();
        for (const auto& k : c.completeness) kw.push_back({{"keyword", k.keyword}, {"covered", k.covered}});
        cases.push_back({{"case_id", c.case_id},
                         {"raters", c.raters},
                         {"metrics", metrics_json(c.metrics)},
                         {"majority",
                          {{"tools", tools},
                           {"statements", c.statements},
                           {"citations", c.citations},
                           {"helpfulness", help},
                           {"completeness", kw}}}});
    }
    return {{"metrics", metrics_json(r.totals)}, {"cases", cases}};
}

std::string render_table(const MetricsReport& r) {
    std::ostringstream out;
    out << std::left << std::setw(22) << "metric" << std::right << std::setw(12) << "count" << std::setw(10) << "percent"
        << "\n";
    out << std::string(44, '-') << "\n";
    for (const auto& [name, field] : metric_fields()) {
        const auto& m = r.totals.*field;
        auto count = std::to_string(m.numerator) + "/" + std::to_string(m.denominator);
        auto pct = m.percent();
        out << std::left << std::setw(22) << name << std::right << std::setw(12) << count << std::setw(10)
            << (pct == "n/a" ? pct : pct + "%") << "\n";
    }
    out << "cases: " << r.cases.size() << "\n";
    return out.str();
}

std::vector<KeywordLabel> completeness_check(const std::string& response_text, const std::vector<Keyword>& keywords) {
    std::vector<KeywordLabel> out;
    for (const auto& k : keywords) {
        bool covered = !text::trim(k.keyword).empty() && text::contains_ci(response_text, k.keyword);
        for (const auto& s : k.synonyms) {
            covered = covered || (!text::trim(s).empty() && text::contains_ci(response_text, s));
        }
        out.push_back({k.keyword, covered});
    }
    return out;
}

} // namespace oncoagent::eval
