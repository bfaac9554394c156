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

#include "oncoagent/agent/pipeline.hpp"

#include "oncoagent/common/error.hpp"
#include "oncoagent/tools/builtin.hpp"
#include "oncoagent/tools/clients.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <deque>
#include <mutex>
#include <set>

namespace oncoagent::agent {

using nlohmann::json;

std::string ModelOverrideProvider::complete(const llm::ChatRequest& request) {
    auto pinned = request;
    pinned.model = model_;
    pinned.temperature = temperature_;
    return inner_->complete(pinned);
}

void RunConfig::validate() const {
    retrieval.validate();
    if (max_calls < 1) throw ArgumentError("max_calls must be at least 1");
    if (refusal_attempts < 1) throw ArgumentError("refusal_attempts must be at least 1");
    if (temperature < 0 || temperature > 2) throw ArgumentError("temperature must lie in [0, 2]");
    if (executor.workers < 1) throw ArgumentError("executor workers must be at least 1");
}

json to_json(const RunConfig& c) {
    return {{"retrieval",
             {{"n", c.retrieval.n},
              {"k", c.retrieval.k},
              {"max_subqueries", c.retrieval.max_subqueries},
              {"reranker", retrieval::to_string(c.retrieval.reranker)},
              {"workers", c.retrieval.workers}}},
            {"executor_workers", c.executor.workers},
            {"max_calls", c.max_calls},
            {"refusal_attempts", c.refusal_attempts},
            {"text_model", c.text_model},
            {"temperature", c.temperature},
            {"forced_plan", c.forced_plan ? tools::to_json(*c.forced_plan) : json(nullptr)},
            {"pubmed_index",
             {{"windows", c.pubmed_index.windows},
              {"overlap", c.pubmed_index.overlap},
              {"batch_size", c.pubmed_index.batch_size},
              {"workers", c.pubmed_index.workers}}}};
}

RunConfig run_config_from_json(const json& j) {
    RunConfig c;
    if (j.contains("retrieval")) {
        const auto& r = j.at("retrieval");
        c.retrieval.n = r.value("n", c.retrieval.n);
        c.retrieval.k = r.value("k", c.retrieval.k);
        c.retrieval.max_subqueries = r.value("max_subqueries", c.retrieval.max_subqueries);
        c.retrieval.reranker = retrieval::reranker_kind_from_string(r.value("reranker", "cosine"));
        c.retrieval.workers = r.value("workers", c.retrieval.workers);
    }
    c.executor.workers = j.value("executor_workers", c.executor.workers);
    c.max_calls = j.value("max_calls", c.max_calls);
    c.refusal_attempts = j.value("refusal_attempts", c.refusal_attempts);
    c.text_model = j.value("text_model", c.text_model);
    c.temperature = j.value("temperature", c.temperature);
    if (j.contains("forced_plan") && !j.at("forced_plan").is_null()) {
        c.forced_plan = tools::plan_from_json(j.at("forced_plan"));
    }
    if (j.contains("pubmed_index")) {
        const auto& p = j.at("pubmed_index");
        c.pubmed_index.windows = p.value("windows", c.pubmed_index.windows);
        c.pubmed_index.overlap = p.value("overlap", c.pubmed_index.overlap);
        c.pubmed_index.batch_size = p.value("batch_size", c.pubmed_index.batch_size);
        c.pubmed_index.workers = p.value("workers", c.pubmed_index.workers);
    }
    return c;
}

std::string to_string(RunStatus status) {
    switch (status) {
    case RunStatus::completed: return "completed";
    case RunStatus::failed: return "failed";
    case RunStatus::refused: return "refused";
    }
    return "failed";
}

std::vector<tools::Abstract> pubmed_abstracts(const std::vector<tools::ToolResult>& results) {
    std::vector<tools::Abstract> out;
    std::set<std::string> seen;
    for (const auto& r : results) {
        if (r.tool != "pubmed_search" || r.status != tools::ToolStatus::ok) continue;
        for (const auto& a : r.output.value("abstracts", json::array())) {
            auto abstract = tools::abstract_from_json(a);
            if (seen.insert(abstract.pmid).second) out.push_back(std::move(abstract));
        }
    }
    return out;
}

namespace {

json results_json(const std::vector<tools::ToolResult>& results) {
    json out = json::array();
    for (const auto& r : results) out.push_back(tools::to_json(r));
    return out;
}

json records_json(const std::vector<llm::CallRecord>& records) {
    json out = json::array();
    for (const auto& r : records) out.push_back(llm::to_json(r));
    return out;
}

// Tool-scope calls arrive in worker order; put them in plan order.
void canonicalize_tool_calls(llm::CallLog& log, std::size_t from, const tools::ExecutionPlan& plan) {
    std::map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < plan.calls.size(); ++i) position["tool:" + plan.calls[i].call_id] = i;
    auto key = [&](const llm::CallRecord& r) {
        auto it = position.find(r.scope);
        return it == position.end() ? plan.calls.size() : it->second;
    };
    log.sort_tail(from, [&](const llm::CallRecord& a, const llm::CallRecord& b) { return key(a) < key(b); });
}

class IndexesRetriever final : public retrieval::PassageRetriever {
public:
    IndexesRetriever(const index::VectorIndex& main, std::unique_ptr<index::VectorIndex> pubmed,
                     index::EmbeddingProvider& embedder)
        : pubmed_(std::move(pubmed)) {
        std::vector<const index::VectorIndex*> indexes{&main};
        if (pubmed_) indexes.push_back(pubmed_.get());
        inner_ = std::make_unique<retrieval::IndexRetriever>(indexes, embedder);
    }

    std::vector<retrieval::RankedPassage> retrieve(const std::string& subquery, std::size_t n) override {
        return inner_->retrieve(subquery, n);
    }

private:
    std::unique_ptr<index::VectorIndex> pubmed_;
    std::unique_ptr<retrieval::IndexRetriever> inner_;
};

} // namespace

FinalResponse run_case_with(const PatientCase& c, const RunConfig& config, Engine& engine) {
    config.validate();
    if (!engine.registry || !engine.text || !engine.make_retriever || !engine.reranker) {
        throw ArgumentError("run_case: engine is missing a component");
    }
    if (!engine.log) engine.log = std::make_shared<llm::CallLog>();
    const auto& registry = *engine.registry;
    auto provider = std::make_shared<llm::LoggingProvider>(
        std::make_shared<ModelOverrideProvider>(engine.text, config.text_model, config.temperature), engine.log);

    FinalResponse out;
    json t{{"schema_version", kTranscriptSchemaVersion},
           {"started_at", llm::utc_timestamp()},
           {"case", to_json(c)},
           {"config", to_json(config)},
           {"tools", registry.specs_json()},
           {"stages", json::array()},
           {"attempts", json::array()}};
    auto stage = [&](const char* name) {
        t["stages"].push_back({{"name", name}, {"started_at", llm::utc_timestamp()}});
    };
    auto finish = [&](RunStatus status, std::string error) {
        out.status = status;
        out.error = std::move(error);
        t["status"] = to_string(status);
        t["error"] = out.error.empty() ? json(nullptr) : json(out.error);
        t["provider_calls"] = records_json(engine.log->records());
        t["finished_at"] = llm::utc_timestamp();
        out.transcript = std::move(t);
        if (status != RunStatus::completed) spdlog::error("case {} {}: {}", c.case_id, to_string(status), out.error);
        return out;
    };

    try {
        std::vector<tools::ToolResult> results;
        for (int attempt = 1;; ++attempt) {
            stage("plan");
            PlanResult planned;
            if (config.forced_plan) {
                planned.plan = *config.forced_plan;
                planned.plan.max_calls = config.max_calls;
                tools::validate_plan(planned.plan, registry);
            } else {
                llm::ScopedCallContext scope("plan");
                planned = plan_actions(c, registry, *provider, config.max_calls);
            }
            json record{{"attempt", attempt},
                        {"plan", tools::to_json(planned.plan)},
                        {"plan_diagnostic", planned.diagnostic.empty() ? json(nullptr) : json(planned.diagnostic)}};
            t["plan"] = record["plan"];
            t["plan_diagnostic"] = record["plan_diagnostic"];

            stage("execute");
            auto from = engine.log->size();
            if (engine.on_attempt) engine.on_attempt(attempt);
            results = tools::execute_plan(planned.plan, registry, config.executor);
            canonicalize_tool_calls(*engine.log, from, planned.plan);
            record["tool_calls"] = {from, engine.log->size()};
            record["tool_results"] = results_json(results);
            t["attempts"].push_back(record);
            t["tool_results"] = record["tool_results"];

            auto refused = std::find_if(results.begin(), results.end(),
                                        [](const auto& r) { return r.status == tools::ToolStatus::refused; });
            if (refused == results.end()) break;
            auto why = "call " + refused->call_id + " (" + refused->tool + ") was refused: " + refused->summary;
            if (attempt >= config.refusal_attempts) {
                return finish(RunStatus::refused, why + "; no attempts left");
            }
            spdlog::warn("{}; restarting (attempt {} of {})", why, attempt + 1, config.refusal_attempts);
        }
        auto tool_outputs = tools::summarize_results(results);

        stage("subqueries");
        std::vector<retrieval::Subquery> subqueries;
        {
            llm::ScopedCallContext scope("subqueries");
            subqueries =
                retrieval::generate_subqueries(c.context, c.question, tool_outputs, *provider, config.retrieval);
        }
        t["subqueries"] = json::array();
        for (const auto& s : subqueries) t["subqueries"].push_back(retrieval::to_json(s));

        stage("retrieval");
        auto retriever = engine.make_retriever(results);
        auto retrieved = retrieval::run_retrieval(subqueries, *retriever, *engine.reranker, config.retrieval);
        t["retrieval"] = json::array();
        for (const auto& per : retrieved.per_subquery) {
            json rows = json::array();
            json kept = json::array();
            for (const auto& p : per.retrieved) rows.push_back(retrieval::to_json(p));
            for (const auto& p : per.kept) kept.push_back(retrieval::to_json(p));
            t["retrieval"].push_back({{"subquery", per.subquery.text}, {"retrieved", rows}, {"kept", kept}});
        }
        const auto& context = retrieved.context;
        t["sources"] = retrieval::to_json(context);
        t["provenance"] = json::array();
        for (const auto& [number, chunk_id] : context.provenance()) {
            const auto& meta = context.source(number).metadata;
            auto doc = meta.find("doc_id");
            t["provenance"].push_back({{"source", number},
                                       {"chunk_id", chunk_id},
                                       {"doc_id", doc == meta.end() ? json(nullptr) : json(doc->second)}});
        }

        stage("strategy");
        Strategy strategy;
        {
            llm::ScopedCallContext scope("strategy");
            strategy = generate_strategy(c, tool_outputs, context, *provider);
        }
        t["strategy"] = to_json(strategy);

        stage("generate");
        CitedResponse draft;
        {
            llm::ScopedCallContext scope("generate");
            draft = generate_cited_response(c, tool_outputs, context, strategy, *provider);
        }
        t["draft_response"] = to_json(draft);

        stage("self_check");
        SelfCheckResult checked;
        {
            llm::ScopedCallContext scope("self_check");
            checked = self_check_citations(draft, context, *provider, [&](const std::string& instructions) {
                llm::ScopedCallContext repair_scope("repair");
                return repair_cited_response(c, tool_outputs, context, strategy, draft, instructions, *provider);
            });
        }
        json verdicts = json::array();
        for (const auto& v : checked.verdicts) verdicts.push_back(to_json(v));
        json dropped = json::array();
        for (const auto& d : checked.dropped) dropped.push_back({{"statement", d.statement}, {"source", d.source}});
        std::size_t generator_calls = 0;
        for (const auto& r : engine.log->records()) generator_calls += is_generator_template(r.template_id) ? 1 : 0;
        t["self_check"] = {{"verdicts", verdicts},
                           {"repaired", checked.repaired},
                           {"repair_instructions", checked.repair_instructions},
                           {"dropped_citations", dropped},
                           {"generator_calls", generator_calls}};
        out.cited_response = checked.response;
        t["cited_response"] = to_json(out.cited_response);

        stage("suggestions");
        {
            llm::ScopedCallContext scope("suggestions");
            out.suggestions = generate_suggestions(out.cited_response, registry, tool_outputs, *provider);
        }
        out.text = out.cited_response.render();
        if (!out.suggestions.empty()) out.text += "\n\n" + out.suggestions;
        t["suggestions"] = out.suggestions;
        t["final_response"] = out.text;
        return finish(RunStatus::completed, {});
    } catch (const std::exception& e) {
        return finish(RunStatus::failed, e.what());
    }
}

FinalResponse run_case(const PatientCase& c, const tools::ToolRegistry& registry, const index::VectorIndex& index,
                       const RunConfig& config, const Providers& providers) {
    if (!providers.text || !providers.embedder) throw ArgumentError("run_case needs a text provider and an embedder");
    Engine engine;
    engine.registry = &registry;
    engine.text = providers.text;
    engine.log = providers.log;
    engine.reranker = providers.reranker ? providers.reranker : std::make_shared<retrieval::CosineReranker>();
    auto embedder = providers.embedder;
    engine.make_retriever = [&index, embedder, &config](const std::vector<tools::ToolResult>& results) {
        std::unique_ptr<index::VectorIndex> pubmed;
        auto abstracts = pubmed_abstracts(results);
        if (!abstracts.empty()) {
            pubmed = std::make_unique<index::VectorIndex>(
                tools::build_pubmed_index(abstracts, *embedder, config.pubmed_index));
        }
        return std::make_unique<IndexesRetriever>(index, std::move(pubmed), *embedder);
    };
    return run_case_with(c, config, engine);
}

json strip_timestamps(const json& j) {
    if (j.is_object()) {
        json out = json::object();
        for (const auto& [k, v] : j.items()) {
            if (k == "timestamp" || k == "started_at" || k == "finished_at") continue;
            out[k] = strip_timestamps(v);
        }
        return out;
    }
    if (j.is_array()) {
        json out = json::array();
        for (const auto& v : j) out.push_back(strip_timestamps(v));
        return out;
    }
    return j;
}

// ---------------------------------------------------------------- replay

namespace {

struct RecordedCalls {
    std::mutex mu;
    int attempt = 0;
    std::map<std::pair<int, std::string>, tools::ToolResult> results;
    std::map<std::pair<int, std::string>, std::vector<llm::CallRecord>> provider_calls;
    std::shared_ptr<llm::CallLog> log;
};

class RecordedTool final : public tools::Tool {
public:
    RecordedTool(tools::ToolSpec spec, std::shared_ptr<RecordedCalls> recorded)
        : spec_(std::move(spec)), recorded_(std::move(recorded)) {}

    const tools::ToolSpec& spec() const override { return spec_; }

    tools::ToolOutput invoke(const json&) override {
        const auto& scope = llm::current_call_scope();
        auto call_id = scope.rfind("tool:", 0) == 0 ? scope.substr(5) : scope;
        tools::ToolResult result;
        {
            std::lock_guard lock(recorded_->mu);
            auto key = std::make_pair(recorded_->attempt, call_id);
            auto it = recorded_->results.find(key);
            if (it == recorded_->results.end()) {
                throw ProviderError("transcript has no recorded result for call " + call_id);
            }
            result = it->second;
            for (const auto& r : recorded_->provider_calls[key]) recorded_->log->append(r);
        }
        if (result.status == tools::ToolStatus::refused) throw RefusalError(result.summary);
        if (result.status == tools::ToolStatus::error) throw ProviderError(result.summary);
        return {result.output, result.summary};
    }

private:
    tools::ToolSpec spec_;
    std::shared_ptr<RecordedCalls> recorded_;
};

class RecordedRetriever final : public retrieval::PassageRetriever {
public:
    explicit RecordedRetriever(std::map<std::string, std::vector<retrieval::RankedPassage>> lists)
        : lists_(std::move(lists)) {}

    std::vector<retrieval::RankedPassage> retrieve(const std::string& subquery, std::size_t n) override {
        auto it = lists_.find(subquery);
        if (it == lists_.end()) throw ProviderError("transcript has no retrieval for subquery: " + subquery);
        auto out = it->second;
        if (out.size() > n) out.resize(n);
        return out;
    }

private:
    std::map<std::string, std::vector<retrieval::RankedPassage>> lists_;
};

// Puts the recorded survivors first, with their recorded scores.
class RecordedReranker final : public retrieval::Reranker {
public:
    explicit RecordedReranker(std::map<std::string, std::vector<retrieval::RankedPassage>> kept)
        : kept_(std::move(kept)) {}

    std::vector<retrieval::RankedPassage> rerank(std::vector<retrieval::RankedPassage> passages,
                                                 const std::string& query) override {
        auto it = kept_.find(query);
        if (it == kept_.end()) return passages;
        std::vector<retrieval::RankedPassage> out = it->second;
        std::set<std::string> ids;
        for (const auto& p : out) ids.insert(p.chunk_id);
        for (auto& p : passages) {
            if (!ids.count(p.chunk_id)) out.push_back(std::move(p));
        }
        return out;
    }

private:
    std::map<std::string, std::vector<retrieval::RankedPassage>> kept_;
};

} // namespace

ReplayResult replay_transcript(const json& transcript) {
    if (transcript.value("schema_version", 0) != kTranscriptSchemaVersion) {
        throw ArgumentError("unsupported transcript schema version");
    }
    auto c = case_from_json(transcript.at("case"));
    auto config = run_config_from_json(transcript.at("config"));
    auto log = std::make_shared<llm::CallLog>();

    std::vector<llm::CallRecord> calls;
    for (const auto& r : transcript.value("provider_calls", json::array())) calls.push_back(llm::call_record_from_json(r));

    auto recorded = std::make_shared<RecordedCalls>();
    recorded->log = log;
    std::vector<bool> tool_call(calls.size(), false);
    for (const auto& a : transcript.value("attempts", json::array())) {
        int attempt = a.at("attempt").get<int>();
        for (const auto& r : a.value("tool_results", json::array())) {
            auto result = tools::tool_result_from_json(r);
            recorded->results[{attempt, result.call_id}] = result;
        }
        if (!a.contains("tool_calls")) continue;
        auto from = a.at("tool_calls").at(0).get<std::size_t>();
        auto to = std::min(a.at("tool_calls").at(1).get<std::size_t>(), calls.size());
        for (auto i = from; i < to; ++i) {
            tool_call[i] = true;
            auto id = calls[i].scope.rfind("tool:", 0) == 0 ? calls[i].scope.substr(5) : calls[i].scope;
            recorded->provider_calls[{attempt, id}].push_back(calls[i]);
        }
    }

    json script = json::object();
    for (std::size_t i = 0; i < calls.size(); ++i) {
        if (tool_call[i]) continue;
        json item{{"scope", calls[i].scope}};
        if (!calls[i].error.empty()) {
            item["error"] = calls[i].error;
        } else {
            item["response"] = calls[i].response;
        }
        script[calls[i].template_id].push_back(item);
    }

    tools::ToolRegistry registry;
    for (const auto& spec : transcript.value("tools", json::array())) {
        registry.add(std::make_shared<RecordedTool>(tools::tool_spec_from_json(spec), recorded));
    }

    std::map<std::string, std::vector<retrieval::RankedPassage>> lists;
    std::map<std::string, std::vector<retrieval::RankedPassage>> kept;
    for (const auto& row : transcript.value("retrieval", json::array())) {
        auto query = row.at("subquery").get<std::string>();
        if (lists.count(query)) continue;
        for (const auto& p : row.at("retrieved")) lists[query].push_back(retrieval::ranked_passage_from_json(p));
        for (const auto& p : row.at("kept")) kept[query].push_back(retrieval::ranked_passage_from_json(p));
    }

    Engine engine;
    engine.registry = &registry;
    engine.text = llm::ScriptedProvider::from_json(script);
    engine.log = log;
    engine.reranker = std::make_shared<RecordedReranker>(std::move(kept));
    engine.make_retriever = [&lists](const std::vector<tools::ToolResult>&) {
        return std::make_unique<RecordedRetriever>(lists);
    };
    engine.on_attempt = [recorded](int attempt) {
        std::lock_guard lock(recorded->mu);
        recorded->attempt = attempt;
    };

    ReplayResult result;
    result.replayed = run_case_with(c, config, engine);
    auto before = strip_timestamps(transcript);
    auto after = strip_timestamps(result.replayed.transcript);
    result.identical = before == after;
    result.differences = json::diff(before, after);
    return result;
}

} // namespace oncoagent::agent
