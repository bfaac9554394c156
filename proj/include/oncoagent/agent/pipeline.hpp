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
#include "oncoagent/agent/stages.hpp"
#include "oncoagent/index/builder.hpp"
#include "oncoagent/index/embedding.hpp"
#include "oncoagent/index/vector_index.hpp"
#include "oncoagent/llm/provider.hpp"
#include "oncoagent/retrieval/retrieval.hpp"
#include "oncoagent/tools/clients.hpp"
#include "oncoagent/tools/executor.hpp"
#include "oncoagent/tools/tool.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace oncoagent::agent {

inline constexpr int kTranscriptSchemaVersion = 1;

/// Pins model name and temperature on every request passing through.
class ModelOverrideProvider final : public llm::ChatProvider {
public:
    ModelOverrideProvider(std::shared_ptr<llm::ChatProvider> inner, std::string model, double temperature)
        : inner_(std::move(inner)), model_(std::move(model)), temperature_(temperature) {}

    std::string complete(const llm::ChatRequest& request) override;

private:
    std::shared_ptr<llm::ChatProvider> inner_;
    std::string model_;
    double temperature_;
};

struct RunConfig {
    retrieval::RetrievalConfig retrieval;
    tools::ExecutorOptions executor;
    int max_calls = tools::ExecutionPlan::kDefaultMaxCalls;
    /// Plan + execute attempts when a tool call is refused.
    int refusal_attempts = 3;
    std::string text_model = llm::kDefaultTextModel;
    double temperature = llm::kDefaultTemperature;
    /// Skips the planner and runs this plan instead.
    std::optional<tools::ExecutionPlan> forced_plan;
    index::BuildOptions pubmed_index;

    /// Throws ArgumentError for out-of-range values.
    void validate() const;
};

nlohmann::json to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);

enum class RunStatus { completed, failed, refused };

std::string to_string(RunStatus status);

struct FinalResponse {
    RunStatus status = RunStatus::completed;
    std::string error;
    CitedResponse cited_response;
    std::string suggestions;
    /// Cited response followed by the suggestions.
    std::string text;
    nlohmann::json transcript;
};

struct Providers {
    std::shared_ptr<llm::ChatProvider> text;
    std::shared_ptr<index::EmbeddingProvider> embedder;
    std::shared_ptr<retrieval::Reranker> reranker;
    /// Shared with any logging vision provider inside the registry so tool
    /// calls land in the transcript. Created when null.
    std::shared_ptr<llm::CallLog> log;
};

/// Builds the retriever once tool results are known (they may contribute a
/// PubMed index).
using RetrieverFactory =
    std::function<std::unique_ptr<retrieval::PassageRetriever>(const std::vector<tools::ToolResult>& results)>;

struct Engine {
    const tools::ToolRegistry* registry = nullptr;
    std::shared_ptr<llm::ChatProvider> text;
    std::shared_ptr<llm::CallLog> log;
    RetrieverFactory make_retriever;
    std::shared_ptr<retrieval::Reranker> reranker;
    /// Called with the attempt number before each plan executes.
    std::function<void(int)> on_attempt;
};

/// Abstracts returned by successful pubmed_search calls, first occurrence
/// of each PMID kept.
std::vector<tools::Abstract> pubmed_abstracts(const std::vector<tools::ToolResult>& results);

/// Plan, execute, subqueries, retrieval, strategy, cited response,
/// self-check, suggestions. Stage errors end the run as failed; exhausted
/// refusal retries end it as refused. The transcript is complete up to the
/// stage that stopped.
FinalResponse run_case(const PatientCase& c, const tools::ToolRegistry& registry, const index::VectorIndex& index,
                       const RunConfig& config, const Providers& providers);

FinalResponse run_case_with(const PatientCase& c, const RunConfig& config, Engine& engine);

/// Copy of `j` without "timestamp", "started_at" and "finished_at" keys.
nlohmann::json strip_timestamps(const nlohmann::json& j);

struct ReplayResult {
    FinalResponse replayed;
    bool identical = false;
    /// JSON patch from the recorded to the replayed transcript, timestamps
    /// excluded.
    nlohmann::json differences;
};

/// Re-runs a transcript with its recorded model outputs, tool results and
/// retrieval lists standing in for the live services.
ReplayResult replay_transcript(const nlohmann::json& transcript);

} // namespace oncoagent::agent
