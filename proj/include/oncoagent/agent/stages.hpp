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

#include "oncoagent/agent/case.hpp"
#include "oncoagent/llm/provider.hpp"
#include "oncoagent/retrieval/retrieval.hpp"
#include "oncoagent/tools/tool.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace oncoagent::agent {

inline constexpr const char* kPlanTemplate = "plan.v1";
inline constexpr const char* kStrategyTemplate = "strategy.v1";
inline constexpr const char* kCitedResponseTemplate = "cited_response.v1";
inline constexpr const char* kRepairTemplate = "cited_response_repair.v1";
inline constexpr const char* kCitationCheckTemplate = "citation_check.v1";
inline constexpr const char* kSuggestionsTemplate = "suggestions.v1";

/// True for the templates that produce a cited response (first draft and
/// the repair).
bool is_generator_template(const std::string& template_id);

struct PlanResult {
    tools::ExecutionPlan plan;
    std::string diagnostic; // set when the model output could not be parsed
};

/// Parses a plan from model output: bare JSON or JSON inside a code fence,
/// either an array of calls or {calls: [...]}. Unparseable output gives an
/// empty plan and a diagnostic.
PlanResult parse_plan(const std::string& output, int max_calls);

/// Asks the model for a plan (template "plan.v1") and validates it against
/// the registry. Throws PlanError for an invalid plan and ArgumentError for
/// an empty registry.
PlanResult plan_actions(const PatientCase& c, const tools::ToolRegistry& registry, llm::ChatProvider& provider,
                        int max_calls = tools::ExecutionPlan::kDefaultMaxCalls);

struct Strategy {
    std::vector<std::string> steps;
    std::vector<std::string> missing_information;
    bool operator==(const Strategy&) const = default;
};

/// One step per line (numbering and bullets stripped). "Missing: a; b"
/// lines feed missing_information. No steps falls back to "answer directly".
Strategy parse_strategy(const std::string& output);

Strategy generate_strategy(const PatientCase& c, const std::string& tool_outputs,
                           const retrieval::QuestionContext& context, llm::ChatProvider& provider);

struct Statement {
    std::string text;
    std::vector<int> citations;
    bool operator==(const Statement&) const = default;
};

struct CitedResponse {
    std::vector<Statement> statements;

    /// Statements one per line, each followed by its "[Source n]" markers.
    std::string render() const;
    bool operator==(const CitedResponse&) const = default;
};

/// Splits at terminal punctuation followed by whitespace and a
/// non-lowercase character, and at line breaks.
std::vector<std::string> split_sentences(const std::string& text);

/// Reads "[Source n]" / "[Sources n, m]" markers. The text before a run of
/// markers is one citation group; a group longer than two sentences is cut
/// into two-sentence statements counted from its end, and only the last one
/// keeps the citations. Trailing text without markers becomes uncited
/// statements.
CitedResponse parse_cited_response(const std::string& output);

struct InvalidCitation {
    std::size_t statement = 0;
    int source = 0;
    bool operator==(const InvalidCitation&) const = default;
};

/// Citations naming a source number absent from the context.
std::vector<InvalidCitation> validate_citations(const CitedResponse& response,
                                                const retrieval::QuestionContext& context);

CitedResponse generate_cited_response(const PatientCase& c, const std::string& tool_outputs,
                                      const retrieval::QuestionContext& context, const Strategy& strategy,
                                      llm::ChatProvider& provider);

/// The repair pass: same inputs plus the previous draft and the list of
/// problems found by the self-check (template "cited_response_repair.v1").
CitedResponse repair_cited_response(const PatientCase& c, const std::string& tool_outputs,
                                    const retrieval::QuestionContext& context, const Strategy& strategy,
                                    const CitedResponse& previous, const std::string& instructions,
                                    llm::ChatProvider& provider);

enum class Verdict { supported, unsupported, invalid_source, uncited, unchecked };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct CitationVerdict {
    std::size_t statement = 0;
    std::optional<int> source; // empty for uncited statements
    Verdict verdict = Verdict::unchecked;
    bool operator==(const CitationVerdict&) const = default;
};

/// "supported" / "unsupported" from checker output. Anything that does not
/// start with "supported" counts as unsupported.
Verdict parse_check_output(const std::string& output);

using RepairFn = std::function<CitedResponse(const std::string& instructions)>;

struct SelfCheckResult {
    std::vector<CitationVerdict> verdicts;
    CitedResponse response; // final
    bool repaired = false;
    std::string repair_instructions;
    std::vector<InvalidCitation> dropped; // invalid citations removed from the final response
};

/// Checks every statement/citation pair with "citation_check.v1".
/// Unsupported or invalid pairs trigger one call to `repair`; its output is
/// final without a second check. Invalid citations left in the final
/// response are dropped. A checker failure returns the original response
/// with its checkable verdicts marked unchecked and no repair.
SelfCheckResult self_check_citations(const CitedResponse& response, const retrieval::QuestionContext& context,
                                     llm::ChatProvider& provider, const RepairFn& repair);

/// Provider failures are logged and yield "".
std::string generate_suggestions(const CitedResponse& response, const tools::ToolRegistry& registry,
                                 const std::string& tool_outputs, llm::ChatProvider& provider);

nlohmann::json to_json(const Strategy& s);
Strategy strategy_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Statement& s);
nlohmann::json to_json(const CitedResponse& r);
CitedResponse cited_response_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CitationVerdict& v);
CitationVerdict citation_verdict_from_json(const nlohmann::json& j);

} // namespace oncoagent::agent
