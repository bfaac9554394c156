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

#include "oncoagent/agent/pipeline.hpp"
#include "oncoagent/common/error.hpp"
#include "oncoagent/index/builder.hpp"
#include "oncoagent/index/embedding.hpp"
#include "oncoagent/llm/provider.hpp"
#include "oncoagent/retrieval/retrieval.hpp"
#include "oncoagent/tools/clients.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace oncoagent::cli {

/// Invalid command-line or configuration input; maps to exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

struct EngineConfig {
    bool offline = false;
    agent::RunConfig run;
    std::string vision_model = llm::kDefaultVisionModel;
    std::filesystem::path templates_dir;
    int http_timeout_seconds = 60;

    llm::RemoteChatSettings chat;
    index::RemoteEmbeddingSettings embedding;
    /// Dimension of the hash embedder used offline.
    std::size_t mock_dimension = 256;
    index::BuildOptions index;
    retrieval::ExternalRerankerSettings reranker;
    tools::GoogleSearchSettings google;
    tools::EutilsSettings pubmed;
    tools::OncoKbSettings oncokb;
    tools::ModelServiceSettings segmentation;
    tools::ModelServiceSettings histology;
    std::size_t web_max_results = 5;
    std::size_t pubmed_max_results = 5;

    /// Offline inputs; default to script.json / mocks.json next to the case.
    std::optional<std::filesystem::path> script;
    std::optional<std::filesystem::path> mocks;

    /// Throws UsageError: temperature outside [0, 2], non-positive
    /// budgets, or an invalid retrieval configuration.
    void validate() const;
};

/// Reads a `.toml` or `.json` config. Relative paths inside resolve against
/// the file's directory. Unknown keys and invalid values are UsageErrors.
EngineConfig load_engine_config(const std::filesystem::path& path);
EngineConfig engine_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");

} // namespace oncoagent::cli
