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

#include "oncoagent/retrieval/retrieval.hpp"

#include "oncoagent/common/error.hpp"
#include "oncoagent/common/parallel.hpp"
#include "oncoagent/common/text.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>
#include <unordered_set>

namespace oncoagent::retrieval {

using nlohmann::json;

std::string to_string(SubqueryOrigin origin) {
    return origin == SubqueryOrigin::manual ? "manual" : "model_generated";
}

SubqueryOrigin subquery_origin_from_string(const std::string& s) {
    if (s == "manual") return SubqueryOrigin::manual;
    if (s == "model_generated") return SubqueryOrigin::model_generated;
    throw ArgumentError("unknown subquery origin: " + s);
}

std::string to_string(RerankerKind kind) { return kind == RerankerKind::external ? "external" : "cosine"; }

RerankerKind reranker_kind_from_string(const std::string& s) {
    if (s == "cosine") return RerankerKind::cosine;
    if (s == "external") return RerankerKind::external;
    throw ArgumentError("unknown reranker: " + s + " (expected cosine or external)");
}

bool QuestionContext::has_source(int number) const {
    return number >= 1 && static_cast<std::size_t>(number) <= sources.size();
}

const RankedPassage& QuestionContext::source(int number) const {
    if (!has_source(number)) {
        throw ArgumentError("Source " + std::to_string(number) + " does not exist (context has " +
                            std::to_string(sources.size()) + ")");
    }
    return sources[static_cast<std::size_t>(number - 1)];
}

std::map<int, std::string> QuestionContext::provenance() const {
    std::map<int, std::string> out;
    for (std::size_t i = 0; i < sources.size(); ++i) out[static_cast<int>(i + 1)] = sources[i].chunk_id;
    return out;
}

std::string QuestionContext::render() const {
    std::string out;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        if (i) out += "\n\n";
        out += "Source " + std::to_string(i + 1) + ": " + sources[i].text;
    }
    return out;
}

void RetrievalConfig::validate() const {
    if (k < 1) throw ArgumentError("retrieval.k must be >= 1");
    if (k > n) throw ArgumentError("retrieval.k must not exceed retrieval.n");
    if (max_subqueries < 1) throw ArgumentError("retrieval.max_subqueries must be >= 1");
    if (workers < 1) throw ArgumentError("retrieval.workers must be >= 1");
}

std::vector<Subquery> parse_subqueries(const std::string& output, const std::string& question,
                                       int max_subqueries) {
    static const std::regex marker(R"(^(?:[-*]+|•|\(?\d{1,3}[.):])\s+)");
    std::vector<Subquery> out;
    for (const auto& raw : text::split_lines(output)) {
        if (static_cast<int>(out.size()) >= max_subqueries) break;
        auto line = text::trim(raw);
        line = text::trim(std::regex_replace(line, marker, "", std::regex_constants::format_first_only));
        if (line.empty()) continue;
        out.push_back({line, SubqueryOrigin::model_generated});
    }
    if (out.empty()) out.push_back({question, SubqueryOrigin::manual});
    return out;
}

std::vector<Subquery> generate_subqueries(const std::string& patient_context, const std::string& question,
                                          const std::string& tool_outputs, llm::ChatProvider& provider,
                                          const RetrievalConfig& config) {
    if (text::trim(question).empty()) throw ArgumentError("question must not be empty");
    config.validate();
    llm::ChatRequest req;
    req.template_id = "subqueries.v1";
    req.variables = {{"patient_context", patient_context},
                     {"question", question},
                     {"tool_outputs", tool_outputs},
                     {"max_subqueries", std::to_string(config.max_subqueries)}};
    return parse_subqueries(provider.complete(req), question, config.max_subqueries);
}

IndexRetriever::IndexRetriever(std::vector<const index::VectorIndex*> indexes, index::EmbeddingProvider& embedder)
    : indexes_(std::move(indexes)), embedder_(embedder) {
    for (const auto* idx : indexes_) {
        if (!idx) throw ArgumentError("null index");
        if (idx->dimension() != embedder_.dimension()) {
            throw IntegrityError("index dimension " + std::to_string(idx->dimension()) +
                                 " does not match embedder dimension " + std::to_string(embedder_.dimension()));
        }
    }
}

std::vector<RankedPassage> IndexRetriever::retrieve(const std::string& subquery, std::size_t n) {
    if (n == 0) throw ArgumentError("n must be >= 1");
    const auto query = index::embed({subquery}, embedder_).front();
    std::vector<RankedPassage> out;
    for (const auto* idx : indexes_) {
        if (idx->empty()) continue;
        for (const auto& hit : idx->search(query, n)) {
            const auto& c = idx->chunk(hit.chunk_id);
            out.push_back({c.chunk_id, c.text, c.metadata, hit.score, std::nullopt});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const RankedPassage& a, const RankedPassage& b) {
        if (a.retrieval_score != b.retrieval_score) return a.retrieval_score > b.retrieval_score;
        return a.chunk_id < b.chunk_id;
    });
    if (out.size() > n) out.resize(n);
    return out;
}

std::vector<RankedPassage> retrieve_for_subquery(const index::VectorIndex& index,
                                                 index::EmbeddingProvider& embedder, const Subquery& subquery,
                                                 const RetrievalConfig& config) {
    if (index.empty()) throw ArgumentError("cannot retrieve from an empty index");
    config.validate();
    IndexRetriever retriever({&index}, embedder);
    return retriever.retrieve(subquery.text, static_cast<std::size_t>(config.n));
}

std::vector<RankedPassage> CosineReranker::rerank(std::vector<RankedPassage> passages, const std::string&) {
    for (auto& p : passages) p.rerank_score = p.retrieval_score;
    std::stable_sort(passages.begin(), passages.end(), [](const RankedPassage& a, const RankedPassage& b) {
        return *a.rerank_score > *b.rerank_score;
    });
    return passages;
}

ExternalReranker::ExternalReranker(std::shared_ptr<http::Transport> transport, ExternalRerankerSettings settings)
    : transport_(std::move(transport)), settings_(std::move(settings)) {}

std::vector<RankedPassage> ExternalReranker::rerank(std::vector<RankedPassage> passages, const std::string& query) {
    if (passages.size() <= 1) return CosineReranker().rerank(std::move(passages), query);
    std::vector<double> scores(passages.size(), std::nan(""));
    try {
        json body{{"query", query}, {"top_n", passages.size()}};
        body["documents"] = json::array();
        for (const auto& p : passages) body["documents"].push_back(p.text);
        if (!settings_.model.empty()) body["model"] = settings_.model;
        auto res = http::send_with_retries(*transport_, http::json_post(settings_.endpoint, body.dump(),
                                                                         settings_.api_key_env),
                                           settings_.retries);
        if (!res.ok()) throw ProviderError("rerank endpoint returned HTTP " + std::to_string(res.status));
        const auto parsed = json::parse(res.body);
        for (const auto& r : parsed.at("results")) {
            auto i = r.at("index").get<std::size_t>();
            auto s = r.at("relevance_score").get<double>();
            if (i >= passages.size() || !std::isfinite(s) || !std::isnan(scores[i])) {
                throw ProviderError("rerank result has an invalid or repeated entry");
            }
            scores[i] = s;
        }
        if (std::any_of(scores.begin(), scores.end(), [](double s) { return std::isnan(s); })) {
            throw ProviderError("rerank results do not cover every passage");
        }
    } catch (const std::exception& e) {
        spdlog::warn("external reranker failed, keeping cosine order: {}", e.what());
        return CosineReranker().rerank(std::move(passages), query);
    }
    for (std::size_t i = 0; i < passages.size(); ++i) passages[i].rerank_score = scores[i];
    std::stable_sort(passages.begin(), passages.end(), [](const RankedPassage& a, const RankedPassage& b) {
        return *a.rerank_score > *b.rerank_score;
    });
    return passages;
}

std::vector<RankedPassage> top_k(std::vector<RankedPassage> passages, int k) {
    if (k < 1) throw ArgumentError("k must be >= 1");
    if (passages.size() > static_cast<std::size_t>(k)) passages.resize(static_cast<std::size_t>(k));
    return passages;
}

QuestionContext merge_and_dedup(const std::vector<std::vector<RankedPassage>>& per_subquery) {
    QuestionContext ctx;
    std::unordered_set<std::string> seen;
    for (const auto& list : per_subquery) {
        for (const auto& p : list) {
            if (seen.insert(text::normalize_for_dedup(p.text)).second) ctx.sources.push_back(p);
        }
    }
    return ctx;
}

RetrievalResult run_retrieval(const std::vector<Subquery>& subqueries, PassageRetriever& retriever,
                              Reranker& reranker, const RetrievalConfig& config) {
    config.validate();
    RetrievalResult result;
    result.per_subquery.resize(subqueries.size());
    parallel_for(subqueries.size(), static_cast<std::size_t>(config.workers), [&](std::size_t i) {
        auto& slot = result.per_subquery[i];
        slot.subquery = subqueries[i];
        slot.retrieved = retriever.retrieve(subqueries[i].text, static_cast<std::size_t>(config.n));
        slot.kept = top_k(reranker.rerank(slot.retrieved, subqueries[i].text), config.k);
    });
    std::vector<std::vector<RankedPassage>> lists;
    for (const auto& s : result.per_subquery) lists.push_back(s.kept);
    result.context = merge_and_dedup(lists);
    return result;
}

json to_json(const RankedPassage& p) {
    json j{{"chunk_id", p.chunk_id}, {"text", p.text}, {"metadata", p.metadata},
           {"retrieval_score", p.retrieval_score}};
    j["rerank_score"] = p.rerank_score ? json(*p.rerank_score) : json(nullptr);
    return j;
}

RankedPassage ranked_passage_from_json(const json& j) {
    RankedPassage p;
    p.chunk_id = j.at("chunk_id").get<std::string>();
    p.text = j.at("text").get<std::string>();
    p.metadata = j.value("metadata", index::Metadata{});
    p.retrieval_score = j.at("retrieval_score").get<double>();
    if (j.contains("rerank_score") && !j.at("rerank_score").is_null()) {
        p.rerank_score = j.at("rerank_score").get<double>();
    }
    return p;
}

json to_json(const Subquery& s) { return {{"text", s.text}, {"origin", to_string(s.origin)}}; }

Subquery subquery_from_json(const json& j) {
    return {j.at("text").get<std::string>(), subquery_origin_from_string(j.at("origin").get<std::string>())};
}

json to_json(const QuestionContext& c) {
    json out = json::array();
    for (std::size_t i = 0; i < c.sources.size(); ++i) {
        auto entry = to_json(c.sources[i]);
        entry["number"] = i + 1;
        out.push_back(std::move(entry));
    }
    return out;
}

QuestionContext question_context_from_json(const json& j) {
    QuestionContext c;
    for (const auto& entry : j) {
        if (entry.value("number", 0) != static_cast<int>(c.sources.size() + 1)) {
            throw IntegrityError("source numbering is not contiguous");
        }
        c.sources.push_back(ranked_passage_from_json(entry));
    }
    return c;
}

} // namespace oncoagent::retrieval
