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

#include "oncoagent/common/http.hpp"
#include "oncoagent/index/embedding.hpp"
#include "oncoagent/index/vector_index.hpp"
#include "oncoagent/llm/provider.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace oncoagent::retrieval {

enum class SubqueryOrigin { model_generated, manual };

std::string to_string(SubqueryOrigin origin);
SubqueryOrigin subquery_origin_from_string(const std::string& s);

struct Subquery {
    std::string text;
    SubqueryOrigin origin = SubqueryOrigin::model_generated;
    bool operator==(const Subquery&) const = default;
};

struct RankedPassage {
    std::string chunk_id;
    std::string text;
    index::Metadata metadata;
    double retrieval_score = 0;
    std::optional<double> rerank_score;
    bool operator==(const RankedPassage&) const = default;
};

/// Numbered sources: `sources[i]` is "Source i+1".
struct QuestionContext {
    std::vector<RankedPassage> sources;

    std::size_t size() const { return sources.size(); }
    bool empty() const { return sources.empty(); }
    bool has_source(int number) const;
    /// Throws ArgumentError when `number` is out of range.
    const RankedPassage& source(int number) const;
    /// Source number -> chunk id.
    std::map<int, std::string> provenance() const;
    /// "Source 1: ...\n\nSource 2: ..." as shown to the model.
    std::string render() const;
    bool operator==(const QuestionContext&) const = default;
};

enum class RerankerKind { cosine, external };

std::string to_string(RerankerKind kind);
RerankerKind reranker_kind_from_string(const std::string& s);

struct RetrievalConfig {
    int n = 40;
    int k = 10;
    int max_subqueries = 12;
    RerankerKind reranker = RerankerKind::cosine;
    int workers = 4;

    /// Throws ArgumentError unless 1 <= k <= n and max_subqueries >= 1.
    void validate() const;
};

/// Asks the model (template "subqueries.v1") for one subquery per line.
/// Bullets and numbering are stripped, blank lines skipped, and the list
/// capped at max_subqueries. No usable line falls back to the question.
std::vector<Subquery> generate_subqueries(const std::string& patient_context, const std::string& question,
                                          const std::string& tool_outputs, llm::ChatProvider& provider,
                                          const RetrievalConfig& config);

/// Parsing half of generate_subqueries.
std::vector<Subquery> parse_subqueries(const std::string& output, const std::string& question,
                                       int max_subqueries);

/// Retrieves up to `n` passages for one subquery text.
class PassageRetriever {
public:
    virtual ~PassageRetriever() = default;
    virtual std::vector<RankedPassage> retrieve(const std::string& subquery, std::size_t n) = 0;
};

/// Exact cosine retrieval over one or more indexes sharing an embedder.
/// Hits from all indexes are merged by descending score (ties by chunk id)
/// and truncated to n.
class IndexRetriever final : public PassageRetriever {
public:
    IndexRetriever(std::vector<const index::VectorIndex*> indexes, index::EmbeddingProvider& embedder);
    std::vector<RankedPassage> retrieve(const std::string& subquery, std::size_t n) override;

private:
    std::vector<const index::VectorIndex*> indexes_;
    index::EmbeddingProvider& embedder_;
};

/// Throws ArgumentError if the index is empty.
std::vector<RankedPassage> retrieve_for_subquery(const index::VectorIndex& index,
                                                 index::EmbeddingProvider& embedder, const Subquery& subquery,
                                                 const RetrievalConfig& config);

class Reranker {
public:
    virtual ~Reranker() = default;
    /// Same passages, ordered by descending rerank_score.
    virtual std::vector<RankedPassage> rerank(std::vector<RankedPassage> passages, const std::string& query) = 0;
};

/// rerank_score = retrieval_score; order kept.
class CosineReranker final : public Reranker {
public:
    std::vector<RankedPassage> rerank(std::vector<RankedPassage> passages, const std::string& query) override;
};

struct ExternalRerankerSettings {
    std::string endpoint = "https://api.cohere.ai/v1/rerank";
    std::string model = "rerank-english-v2.0";
    std::string api_key_env = "COHERE_API_KEY";
    int retries = 3;
};

/// HTTP contract: POST {query, documents, top_n[, model]} ->
/// {results: [{index, relevance_score}]}. Any failure or an incomplete
/// result set falls back to cosine order with a warning.
class ExternalReranker final : public Reranker {
public:
    ExternalReranker(std::shared_ptr<http::Transport> transport, ExternalRerankerSettings settings = {});
    std::vector<RankedPassage> rerank(std::vector<RankedPassage> passages, const std::string& query) override;

private:
    std::shared_ptr<http::Transport> transport_;
    ExternalRerankerSettings settings_;
};

/// Throws ArgumentError when k < 1.
std::vector<RankedPassage> top_k(std::vector<RankedPassage> passages, int k);

/// Concatenates the lists in order, drops passages whose normalized text was
/// already seen, and numbers the survivors from 1.
QuestionContext merge_and_dedup(const std::vector<std::vector<RankedPassage>>& per_subquery);

struct SubqueryRetrieval {
    Subquery subquery;
    std::vector<RankedPassage> retrieved;
    std::vector<RankedPassage> kept;
};

struct RetrievalResult {
    std::vector<SubqueryRetrieval> per_subquery;
    QuestionContext context;
};

/// Retrieve n -> rerank -> top k for each subquery (concurrently), then
/// merge_and_dedup in subquery order.
RetrievalResult run_retrieval(const std::vector<Subquery>& subqueries, PassageRetriever& retriever,
                              Reranker& reranker, const RetrievalConfig& config);

nlohmann::json to_json(const RankedPassage& p);
RankedPassage ranked_passage_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Subquery& s);
Subquery subquery_from_json(const nlohmann::json& j);
nlohmann::json to_json(const QuestionContext& c);
QuestionContext question_context_from_json(const nlohmann::json& j);

} // namespace oncoagent::retrieval
