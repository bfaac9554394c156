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

#include "oncoagent/agent/stages.hpp"

#include "oncoagent/common/error.hpp"
#include "oncoagent/common/text.hpp"
#include "oncoagent/tools/executor.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <regex>

namespace oncoagent::agent {

using nlohmann::json;

namespace {

const std::regex& list_marker() {
    static const std::regex re(R"(^(?:[-*]+|•|\(?\d{1,3}[.):])\s+)");
    return re;
}

std::string strip_marker(const std::string& line) {
    return text::trim(std::regex_replace(text::trim(line), list_marker(), "", std::regex_constants::format_first_only));
}

std::string complete(llm::ChatProvider& provider, const std::string& template_id,
                     std::map<std::string, std::string> vars) {
    llm::ChatRequest request;
    request.template_id = template_id;
    request.variables = std::move(vars);
    return provider.complete(request);
}

std::string strategy_text(const Strategy& s) {
    std::string out;
    for (std::size_t i = 0; i < s.steps.size(); ++i) out += std::to_string(i + 1) + ". " + s.steps[i] + "\n";
    if (!s.missing_information.empty()) out += "Missing: " + text::join(s.missing_information, "; ") + "\n";
    return out;
}

std::map<std::string, std::string> generator_vars(const PatientCase& c, const std::string& tool_outputs,
                                                  const retrieval::QuestionContext& context,
                                                  const Strategy& strategy) {
    return {{"patient_context", c.context},
            {"question", c.question},
            {"tool_outputs", tool_outputs},
            {"sources", context.render()},
            {"source_count", std::to_string(context.size())},
            {"strategy", strategy_text(strategy)}};
}

bool is_terminal(char ch) { return ch == '.' || ch == '!' || ch == '?'; }
bool is_closer(char ch) { return ch == ')' || ch == '"' || ch == '\'' || ch == ']'; }

} // namespace

bool is_generator_template(const std::string& template_id) {
    return template_id == kCitedResponseTemplate || template_id == kRepairTemplate;
}

// ---------------------------------------------------------------- plan

PlanResult parse_plan(const std::string& output, int max_calls) {
    PlanResult result;
    result.plan.max_calls = max_calls;
    std::string body = output;
    if (auto fence = body.find("```"); fence != std::string::npos) {
        auto start = body.find('\n', fence);
        auto end = start == std::string::npos ? std::string::npos : body.find("```", start);
        body = start == std::string::npos ? std::string{} : body.substr(start + 1, end == std::string::npos ? std::string::npos : end - start - 1);
    }
    body = text::trim(body);
    if (body.empty()) {
        result.diagnostic = "plan output is empty";
        return result;
    }
    auto first = body.find_first_of("[{");
    auto last = body.find_last_of("]}");
    if (first == std::string::npos || last == std::string::npos || last < first) {
        result.diagnostic = "plan output contains no JSON";
        return result;
    }
    try {
        auto plan = tools::plan_from_json(json::parse(body.substr(first, last - first + 1)));
        result.plan.calls = std::move(plan.calls);
    } catch (const std::exception& e) {
        result.plan.calls.clear();
        result.diagnostic = std::string("unparseable plan output: ") + e.what();
    }
    return result;
}

PlanResult plan_actions(const PatientCase& c, const tools::ToolRegistry& registry, llm::ChatProvider& provider,
                        int max_calls) {
    if (registry.empty()) throw ArgumentError("plan_actions needs a non-empty tool registry");
    json atts = json::array();
    for (const auto& a : c.attachments) atts.push_back(to_json(a));
    auto output = complete(provider, kPlanTemplate,
                           {{"patient_context", c.context},
                            {"question", c.question},
                            {"attachments", atts.dump(2)},
                            {"tools", registry.specs_json().dump(2)},
                            {"max_calls", std::to_string(max_calls)}});
    auto result = parse_plan(output, max_calls);
    if (!result.diagnostic.empty()) spdlog::warn("planner: {}; continuing without tools", result.diagnostic);
    tools::validate_plan(result.plan, registry);
    return result;
}

// ---------------------------------------------------------------- strategy

Strategy parse_strategy(const std::string& output) {
    static const std::regex missing(R"(^\**\s*missing(?:\s+information)?\s*\**\s*:\s*(.*)$)", std::regex::icase);
    Strategy s;
    for (const auto& raw : text::split_lines(output)) {
        auto line = strip_marker(raw);
        if (line.empty()) continue;
        std::smatch m;
        if (std::regex_match(line, m, missing)) {
            std::string rest = m[1].str();
            std::size_t pos = 0;
            while (pos <= rest.size()) {
                auto semi = rest.find(';', pos);
                auto item = text::trim(rest.substr(pos, semi == std::string::npos ? std::string::npos : semi - pos));
                if (!item.empty()) s.missing_information.push_back(item);
                if (semi == std::string::npos) break;
                pos = semi + 1;
            }
            continue;
        }
        if (line.back() == ':' && line.size() < 40) continue; // heading
        s.steps.push_back(line);
    }
    if (s.steps.empty()) s.steps.push_back("answer directly");
    return s;
}

Strategy generate_strategy(const PatientCase& c, const std::string& tool_outputs,
                           const retrieval::QuestionContext& context, llm::ChatProvider& provider) {
    return parse_strategy(complete(provider, kStrategyTemplate,
                                   {{"patient_context", c.context},
                                    {"question", c.question},
                                    {"tool_outputs", tool_outputs},
                                    {"sources", context.render()}}));
}

// ---------------------------------------------------------------- cited response

std::string CitedResponse::render() const {
    std::string out;
    for (std::size_t i = 0; i < statements.size(); ++i) {
        const auto& st = statements[i];
        std::string markers;
        for (int n : st.citations) markers += " [Source " + std::to_string(n) + "]";
        std::string body = st.text;
        std::string tail;
        if (!markers.empty() && !body.empty() && is_terminal(body.back())) {
            tail = body.substr(body.size() - 1);
            body.pop_back();
        }
        if (i) out += "\n";
        out += body + markers + tail;
    }
    return out;
}

std::vector<std::string> split_sentences(const std::string& input) {
    std::vector<std::string> out;
    for (const auto& raw : text::split_lines(input)) {
        auto line = strip_marker(raw);
        std::size_t begin = 0;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (!is_terminal(line[i])) continue;
            std::size_t j = i + 1;
            while (j < line.size() && (is_terminal(line[j]) || is_closer(line[j]))) ++j;
            if (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) continue;
            std::size_t k = j;
            while (k < line.size() && std::isspace(static_cast<unsigned char>(line[k]))) ++k;
            if (k < line.size() && std::islower(static_cast<unsigned char>(line[k]))) continue;
            auto sentence = text::trim(line.substr(begin, j - begin));
            if (!sentence.empty()) out.push_back(sentence);
            begin = j;
            i = j > 0 ? j - 1 : 0;
        }
        auto rest = text::trim(line.substr(std::min(begin, line.size())));
        if (!rest.empty()) out.push_back(rest);
    }
    return out;
}

CitedResponse parse_cited_response(const std::string& output) {
    static const std::regex marker(R"(\[\s*sources?\s+(\d+(?:\s*(?:,|and|&)\s*\d+)*)\s*\])", std::regex::icase);
    static const std::regex number(R"(\d+)");
    CitedResponse response;

    auto emit = [&](const std::string& segment, const std::vector<int>& citations) {
        auto sentences = split_sentences(segment);
        if (sentences.empty()) {
            if (!citations.empty() && !response.statements.empty()) {
                auto& prev = response.statements.back().citations;
                for (int n : citations) {
                    if (std::find(prev.begin(), prev.end(), n) == prev.end()) prev.push_back(n);
                }
            }
            return;
        }
        std::vector<Statement> groups;
        std::size_t end = sentences.size();
        while (end > 0) {
            std::size_t start = end >= 2 ? end - 2 : 0;
            std::vector<std::string> part(sentences.begin() + static_cast<long>(start),
                                          sentences.begin() + static_cast<long>(end));
            groups.insert(groups.begin(), Statement{text::join(part, " "), {}});
            end = start;
        }
        groups.back().citations = citations;
        for (auto& g : groups) response.statements.push_back(std::move(g));
    };

    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::vector<std::vector<int>> numbers;
    for (auto it = std::sregex_iterator(output.begin(), output.end(), marker); it != std::sregex_iterator(); ++it) {
        spans.emplace_back(static_cast<std::size_t>(it->position()),
                           static_cast<std::size_t>(it->position() + it->length()));
        std::vector<int> ns;
        auto inner = (*it)[1].str();
        for (auto n = std::sregex_iterator(inner.begin(), inner.end(), number); n != std::sregex_iterator(); ++n) {
            ns.push_back(std::stoi(n->str()));
        }
        numbers.push_back(std::move(ns));
    }

    std::size_t pos = 0;
    std::size_t i = 0;
    while (i < spans.size()) {
        std::string segment = output.substr(pos, spans[i].first - pos);
        std::vector<int> citations;
        std::size_t end = spans[i].second;
        auto add = [&](const std::vector<int>& ns) {
            for (int n : ns) {
                if (std::find(citations.begin(), citations.end(), n) == citations.end()) citations.push_back(n);
            }
        };
        add(numbers[i]);
        ++i;
        while (i < spans.size()) {
            auto gap = output.substr(end, spans[i].first - end);
            if (!text::trim(gap).empty() && text::trim(gap) != ",") break;
            add(numbers[i]);
            end = spans[i].second;
            ++i;
        }
        if (end < output.size() && is_terminal(output[end])) {
            while (!segment.empty() && std::isspace(static_cast<unsigned char>(segment.back()))) segment.pop_back();
            while (end < output.size() && is_terminal(output[end])) segment += output[end++];
        }
        emit(segment, citations);
        pos = end;
    }
    emit(output.substr(pos), {});
    return response;
}

std::vector<InvalidCitation> validate_citations(const CitedResponse& response,
                                                const retrieval::QuestionContext& context) {
    std::vector<InvalidCitation> out;
    for (std::size_t i = 0; i < response.statements.size(); ++i) {
        for (int n : response.statements[i].citations) {
            if (!context.has_source(n)) out.push_back({i, n});
        }
    }
    return out;
}

CitedResponse generate_cited_response(const PatientCase& c, const std::string& tool_outputs,
                                      const retrieval::QuestionContext& context, const Strategy& strategy,
                                      llm::ChatProvider& provider) {
    auto response =
        parse_cited_response(complete(provider, kCitedResponseTemplate, generator_vars(c, tool_outputs, context, strategy)));
    for (const auto& bad : validate_citations(response, context)) {
        spdlog::warn("statement {} cites Source {}, which does not exist", bad.statement + 1, bad.source);
    }
    return response;
}

CitedResponse repair_cited_response(const PatientCase& c, const std::string& tool_outputs,
                                    const retrieval::QuestionContext& context, const Strategy& strategy,
                                    const CitedResponse& previous, const std::string& instructions,
                                    llm::ChatProvider& provider) {
    auto vars = generator_vars(c, tool_outputs, context, strategy);
    vars["previous_response"] = previous.render();
    vars["repair_instructions"] = instructions;
    return parse_cited_response(complete(provider, kRepairTemplate, std::move(vars)));
}

// ---------------------------------------------------------------- self-check

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::supported: return "supported";
    case Verdict::unsupported: return "unsupported";
    case Verdict::invalid_source: return "invalid_source";
    case Verdict::uncited: return "uncited";
    case Verdict::unchecked: return "unchecked";
    }
    return "unchecked";
}

Verdict verdict_from_string(const std::string& s) {
    for (auto v : {Verdict::supported, Verdict::unsupported, Verdict::invalid_source, Verdict::uncited,
                   Verdict::unchecked}) {
        if (to_string(v) == s) return v;
    }
    throw ArgumentError("unknown verdict: " + s);
}

Verdict parse_check_output(const std::string& output) {
    auto s = text::to_lower(text::trim(output));
    while (!s.empty() && !std::isalpha(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    return s.rfind("supported", 0) == 0 ? Verdict::supported : Verdict::unsupported;
}

SelfCheckResult self_check_citations(const CitedResponse& response, const retrieval::QuestionContext& context,
                                     llm::ChatProvider& provider, const RepairFn& repair) {
    SelfCheckResult result;
    result.response = response;
    std::vector<std::string> problems;
    std::vector<std::size_t> pending;

    for (std::size_t i = 0; i < response.statements.size(); ++i) {
        const auto& st = response.statements[i];
        if (st.citations.empty()) {
            result.verdicts.push_back({i, std::nullopt, Verdict::uncited});
            continue;
        }
        for (int n : st.citations) {
            if (!context.has_source(n)) {
                result.verdicts.push_back({i, n, Verdict::invalid_source});
                problems.push_back("Statement " + std::to_string(i + 1) + " (\"" + st.text + "\") cites Source " +
                                   std::to_string(n) + ", which does not exist.");
            } else {
                pending.push_back(result.verdicts.size());
                result.verdicts.push_back({i, n, Verdict::unchecked});
            }
        }
    }

    bool checker_failed = false;
    try {
        for (auto idx : pending) {
            auto& v = result.verdicts[idx];
            const auto& st = response.statements[v.statement];
            auto out = complete(provider, kCitationCheckTemplate,
                                {{"statement", st.text},
                                 {"source_number", std::to_string(*v.source)},
                                 {"passage", context.source(*v.source).text}});
            v.verdict = parse_check_output(out);
            if (v.verdict == Verdict::unsupported) {
                problems.push_back("Statement " + std::to_string(v.statement + 1) + " (\"" + st.text +
                                   "\") cites Source " + std::to_string(*v.source) +
                                   ", which does not support it.");
            }
        }
    } catch (const ProviderError& e) {
        checker_failed = true;
        spdlog::warn("citation check failed ({}); keeping the response unchecked", e.what());
    } catch (const TransportError& e) {
        checker_failed = true;
        spdlog::warn("citation check failed ({}); keeping the response unchecked", e.what());
    }
    if (checker_failed) {
        for (auto idx : pending) result.verdicts[idx].verdict = Verdict::unchecked;
    } else if (!problems.empty() && repair) {
        result.repair_instructions = text::join(problems, "\n");
        try {
            result.response = repair(result.repair_instructions);
            result.repaired = true;
        } catch (const ProviderError& e) {
            spdlog::warn("citation repair failed ({}); keeping the first draft", e.what());
        } catch (const TransportError& e) {
            spdlog::warn("citation repair failed ({}); keeping the first draft", e.what());
        }
    }

    result.dropped = validate_citations(result.response, context);
    for (auto& st : result.response.statements) {
        std::erase_if(st.citations, [&](int n) { return !context.has_source(n); });
    }
    return result;
}

// ---------------------------------------------------------------- suggestions

std::string generate_suggestions(const CitedResponse& response, const tools::ToolRegistry& registry,
                                 const std::string& tool_outputs, llm::ChatProvider& provider) {
    std::string tool_list;
    for (const auto& spec : registry.specs_json()) {
        tool_list += "- " + spec.at("name").get<std::string>() + ": " + spec.value("description", "") + "\n";
    }
    try {
        return complete(provider, kSuggestionsTemplate,
                        {{"response", response.render()}, {"tools", tool_list}, {"tool_outputs", tool_outputs}});
    } catch (const ProviderError& e) {
        spdlog::warn("suggestions unavailable: {}", e.what());
    } catch (const TransportError& e) {
        spdlog::warn("suggestions unavailable: {}", e.what());
    }
    return {};
}

// ---------------------------------------------------------------- json

json to_json(const Strategy& s) { return {{"steps", s.steps}, {"missing_information", s.missing_information}}; }

Strategy strategy_from_json(const json& j) {
    return {j.at("steps").get<std::vector<std::string>>(),
            j.value("missing_information", std::vector<std::string>{})};
}

json to_json(const Statement& s) { return {{"text", s.text}, {"citations", s.citations}}; }

json to_json(const CitedResponse& r) {
    json statements = json::array();
    for (const auto& s : r.statements) statements.push_back(to_json(s));
    return {{"statements", statements}};
}

CitedResponse cited_response_from_json(const json& j) {
    CitedResponse r;
    for (const auto& s : j.at("statements")) {
        r.statements.push_back({s.at("text").get<std::string>(), s.value("citations", std::vector<int>{})});
    }
    return r;
}

json to_json(const CitationVerdict& v) {
    return {{"statement", v.statement},
            {"source", v.source ? json(*v.source) : json(nullptr)},
            {"verdict", to_string(v.verdict)}};
}

CitationVerdict citation_verdict_from_json(const json& j) {
    CitationVerdict v;
    v.statement = j.at("statement").get<std::size_t>();
    if (j.contains("source") && !j.at("source").is_null()) v.source = j.at("source").get<int>();
    v.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    return v;
}

} // namespace oncoagent::agent
