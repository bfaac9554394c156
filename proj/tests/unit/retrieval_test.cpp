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
#include "oncoagent/common/text.hpp"
#include "oncoagent/index/builder.hpp"
#include "oncoagent/retrieval/retrieval.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace oncoagent;
using namespace oncoagent::retrieval;

namespace {

index::Chunk text_chunk(const std::string& id, const std::string& text) {
    index::Chunk c;
    c.chunk_id = id;
    c.doc_id = id;
    c.text = text;
    c.window = 128;
    c.token_len = 1;
    return c;
}

index::VectorIndex mock_index(const std::vector<std::string>& texts, index::MockEmbeddingProvider& emb) {
    index::VectorIndex idx(emb.dimension(), emb.model());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        idx.add(text_chunk("c" + std::to_string(i), texts[i]), emb.embed_one(texts[i]));
    }
    return idx;
}

RankedPassage passage(const std::string& id, const std::string& text, double score = 0.5) {
    return {id, text, {}, score, std::nullopt};
}

std::vector<std::string> ids(const std::vector<RankedPassage>& ps) {
    std::vector<std::string> out;
    for (const auto& p : ps) out.push_back(p.chunk_id);
    return out;
}

// Independent brute-force ranking of every stored chunk.
std::vector<std::string> oracle_ranking(const index::VectorIndex& idx, const index::Vector& q) {
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& r : idx.records()) {
        double d = 0, a = 0, b = 0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            d += double(q[i]) * r.vector[i];
            a += double(q[i]) * q[i];
            b += double(r.vector[i]) * r.vector[i];
        }
        scored.emplace_back(d / std::sqrt(a * b), r.chunk_id);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
        return x.first != y.first ? x.first > y.first : x.second < y.second;
    });
    std::vector<std::string> out;
    for (const auto& s : scored) out.push_back(s.second);
    return out;
}

class ReversingTransport {
public:
    static std::shared_ptr<http::RecordingTransport> make() {
        return std::make_shared<http::RecordingTransport>([](const http::Request& req) {
            auto body = nlohmann::json::parse(req.body);
            auto n = body.at("documents").size();
            nlohmann::json results = nlohmann::json::array();
            for (std::size_t i = 0; i < n; ++i) {
                results.push_back({{"index", i}, {"relevance_score", double(i) / double(n)}});
            }
            return http::Response{200, nlohmann::json{{"results", results}}.dump()};
        });
    }
};

} // namespace

TEST(Subqueries, ParsesLinesInOrder) {
    llm::ScriptedProvider p;
    p.push("subqueries.v1", "1. What is BRAF?\n- ROS1 fusion therapy\n\n* staging of CRC\n");
    auto s = generate_subqueries("ctx", "Q?", "", p, {});
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[0].text, "What is BRAF?");
    EXPECT_EQ(s[1].text, "ROS1 fusion therapy");
    EXPECT_EQ(s[2].text, "staging of CRC");
    EXPECT_EQ(s[0].origin, SubqueryOrigin::model_generated);
    auto call = p.calls().at(0);
    EXPECT_EQ(call.variables.at("question"), "Q?");
    EXPECT_EQ(call.variables.at("max_subqueries"), "12");
    EXPECT_DOUBLE_EQ(call.temperature, 0.1);
}

TEST(Subqueries, CapTruncatesExtraLines) {
    llm::ScriptedProvider p;
    std::string out;
    for (int i = 1; i <= 15; ++i) out += "question " + std::to_string(i) + "\n";
    p.push("subqueries.v1", out);
    auto s = generate_subqueries("ctx", "Q", "", p, {});
    ASSERT_EQ(s.size(), 12u);
    EXPECT_EQ(s.front().text, "question 1");
    EXPECT_EQ(s.back().text, "question 12");
}

TEST(Subqueries, EmptyOutputFallsBackToQuestion) {
    llm::ScriptedProvider p;
    p.push("subqueries.v1", "  \n\n");
    auto s = generate_subqueries("ctx", "Which therapy?", "", p, {});
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0].text, "Which therapy?");
    EXPECT_EQ(s[0].origin, SubqueryOrigin::manual);
}

TEST(Subqueries, ErrorsPropagate) {
    llm::ScriptedProvider p;
    p.push_error("subqueries.v1", "boom");
    EXPECT_THROW(generate_subqueries("ctx", "Q", "", p, {}), ProviderError);
    EXPECT_THROW(generate_subqueries("ctx", " ", "", p, {}), ArgumentError);
}

TEST(Subqueries, NumbersInsideTextAreKept) {
    auto s = parse_subqueries("10.5 cm lesion growth\n2) next", "Q", 12);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[0].text, "10.5 cm lesion growth");
    EXPECT_EQ(s[1].text, "next");
}

TEST(RetrieveForSubquery, FewerThanN) {
    index::MockEmbeddingProvider emb(32);
    auto idx = mock_index({"a b", "c d", "e f", "g h", "i j"}, emb);
    auto out = retrieve_for_subquery(idx, emb, {"a"}, {});
    EXPECT_EQ(out.size(), 5u);
    for (std::size_t i = 1; i < out.size(); ++i) EXPECT_GE(out[i - 1].retrieval_score, out[i].retrieval_score);
}

TEST(RetrieveForSubquery, SelfRetrieval) {
    index::MockEmbeddingProvider emb(64);
    auto idx = mock_index({"braf inhibitor therapy", "ros1 fusion crizotinib", "folfox and bevacizumab"}, emb);
    auto out = retrieve_for_subquery(idx, emb, {"ros1 fusion crizotinib"}, {});
    EXPECT_EQ(out[0].chunk_id, "c1");
    EXPECT_NEAR(out[0].retrieval_score, 1.0, 1e-6);
    EXPECT_FALSE(out[0].rerank_score.has_value());
}

TEST(RetrieveForSubquery, MatchesOracleOnHundredChunks) {
    index::MockEmbeddingProvider emb(48);
    std::mt19937 rng(3);
    std::vector<std::string> texts;
    for (int i = 0; i < 100; ++i) {
        std::string t;
        for (int w = 0; w < 6; ++w) t += oncoagent::testing::random_word(rng, 2, 4) + " ";
        texts.push_back(t);
    }
    auto idx = mock_index(texts, emb);
    for (int q = 0; q < 10; ++q) {
        auto query = oncoagent::testing::random_word(rng, 2, 4) + " " + oncoagent::testing::random_word(rng, 2, 4);
        auto expected = oracle_ranking(idx, emb.embed_one(query));
        expected.resize(40);
        EXPECT_EQ(ids(retrieve_for_subquery(idx, emb, {query}, {})), expected);
    }
}

TEST(RetrieveForSubquery, EmptyIndexRejected) {
    index::MockEmbeddingProvider emb(8);
    index::VectorIndex idx(8);
    EXPECT_THROW(retrieve_for_subquery(idx, emb, {"q"}, {}), ArgumentError);
}

TEST(IndexRetriever, MergesMainAndEphemeralIndexes) {
    index::MockEmbeddingProvider emb(32);
    auto main = mock_index({"alpha beta", "gamma delta"}, emb);
    index::VectorIndex side(emb.dimension());
    side.add(text_chunk("pubmed:1", "alpha beta gamma"), emb.embed_one("alpha beta gamma"));
    IndexRetriever r({&main, &side}, emb);
    auto out = r.retrieve("alpha beta gamma", 2);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].chunk_id, "pubmed:1");
}

TEST(Rerank, CosineIsIdentity) {
    std::vector<RankedPassage> in{passage("a", "x", 0.9), passage("b", "y", 0.5), passage("c", "z", 0.1)};
    auto out = CosineReranker().rerank(in, "q");
    EXPECT_EQ(ids(out), ids(in));
    for (const auto& p : out) EXPECT_EQ(*p.rerank_score, p.retrieval_score);
}

TEST(Rerank, ExternalReversedScores) {
    auto transport = ReversingTransport::make();
    ExternalReranker r(transport);
    std::vector<RankedPassage> in{passage("a", "x", 0.9), passage("b", "y", 0.5), passage("c", "z", 0.1)};
    auto out = r.rerank(in, "q");
    EXPECT_EQ(ids(out), (std::vector<std::string>{"c", "b", "a"}));
    auto sent = nlohmann::json::parse(transport->requests().at(0).body);
    EXPECT_EQ(sent.at("query"), "q");
    EXPECT_EQ(sent.at("top_n"), 3);
    EXPECT_EQ(sent.at("documents"), nlohmann::json::array({"x", "y", "z"}));
}

TEST(Rerank, ExternalFailureFallsBackToCosine) {
    auto failing = std::make_shared<http::RecordingTransport>(
        [](const http::Request&) { return http::Response{400, "bad"}; });
    auto partial = std::make_shared<http::RecordingTransport>([](const http::Request&) {
        return http::Response{200, R"({"results":[{"index":0,"relevance_score":0.1}]})"};
    });
    std::vector<RankedPassage> in{passage("a", "x", 0.9), passage("b", "y", 0.5)};
    for (auto t : {failing, partial}) {
        ExternalRerankerSettings s;
        s.retries = 1;
        auto out = ExternalReranker(t, s).rerank(in, "q");
        EXPECT_EQ(ids(out), ids(in));
        EXPECT_EQ(*out[0].rerank_score, 0.9);
    }
}

TEST(Rerank, SingletonUnchanged) {
    auto transport = ReversingTransport::make();
    auto out = ExternalReranker(transport).rerank({passage("a", "x", 0.3)}, "q");
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].chunk_id, "a");
    EXPECT_EQ(CosineReranker().rerank({passage("a", "x", 0.3)}, "q")[0].chunk_id, "a");
}

TEST(TopK, Examples) {
    std::vector<RankedPassage> forty;
    for (int i = 0; i < 40; ++i) forty.push_back(passage("p" + std::to_string(i), "t" + std::to_string(i)));
    auto ten = top_k(forty, 10);
    ASSERT_EQ(ten.size(), 10u);
    EXPECT_EQ(ten.back().chunk_id, "p9");
    EXPECT_EQ(top_k({passage("a", "a"), passage("b", "b"), passage("c", "c")}, 10).size(), 3u);
    EXPECT_THROW(top_k(forty, 0), ArgumentError);
}

TEST(MergeAndDedup, SharedPassageCountedOnce) {
    auto ctx = merge_and_dedup({{passage("a", "one"), passage("b", "two")},
                                {passage("b", "two"), passage("c", "three")}});
    EXPECT_EQ(ctx.size(), 3u);
    EXPECT_EQ(ctx.source(3).chunk_id, "c");
}

TEST(MergeAndDedup, WhitespaceAndCaseDuplicates) {
    auto ctx = merge_and_dedup({{passage("a", "BRAF  V600E\nmutation")}, {passage("z", "braf v600e mutation")}});
    ASSERT_EQ(ctx.size(), 1u);
    EXPECT_EQ(ctx.source(1).chunk_id, "a");
}

TEST(MergeAndDedup, TwelveByTenDistinct) {
    std::vector<std::vector<RankedPassage>> lists(12);
    for (int s = 0; s < 12; ++s) {
        for (int i = 0; i < 10; ++i) {
            auto id = std::to_string(s) + "-" + std::to_string(i);
            lists[static_cast<std::size_t>(s)].push_back(passage(id, "text " + id));
        }
    }
    auto ctx = merge_and_dedup(lists);
    ASSERT_EQ(ctx.size(), 120u);
    auto prov = ctx.provenance();
    EXPECT_EQ(prov.begin()->first, 1);
    EXPECT_EQ(prov.rbegin()->first, 120);
    EXPECT_EQ(prov.at(11), "1-0");
    EXPECT_NE(ctx.render().find("Source 120: text 11-9"), std::string::npos);
    EXPECT_THROW(ctx.source(121), ArgumentError);
    EXPECT_THROW(ctx.source(0), ArgumentError);
}

TEST(MergeAndDedup, IdempotentAndProvenanceBijective) {
    std::mt19937 rng(17);
    std::uniform_int_distribution<int> pick(0, 30);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::vector<RankedPassage>> lists(5);
        for (auto& l : lists) {
            for (int i = 0; i < 8; ++i) {
                int v = pick(rng);
                std::string text = (v % 2 ? "Text " : "text  ") + std::to_string(v / 2);
                l.push_back(passage("id" + std::to_string(v), text));
            }
        }
        auto ctx = merge_and_dedup(lists);
        EXPECT_EQ(merge_and_dedup({ctx.sources}), ctx);
        std::set<std::string> keys;
        auto prov = ctx.provenance();
        ASSERT_EQ(prov.size(), ctx.size());
        for (const auto& [n, id] : prov) {
            EXPECT_EQ(ctx.source(n).chunk_id, id);
            keys.insert(text::normalize_for_dedup(ctx.source(n).text));
        }
        EXPECT_EQ(keys.size(), ctx.size());
    }
}

TEST(RunRetrieval, DeterministicAndBounded) {
    index::MockEmbeddingProvider emb(32);
    std::mt19937 rng(5);
    std::vector<std::string> texts;
    for (int i = 0; i < 300; ++i) {
        texts.push_back(oncoagent::testing::random_word(rng, 3, 6) + " " + oncoagent::testing::random_word(rng, 3, 6));
    }
    auto idx = mock_index(texts, emb);
    IndexRetriever retriever({&idx}, emb);
    CosineReranker reranker;
    std::vector<Subquery> subs;
    for (int i = 0; i < 12; ++i) subs.push_back({oncoagent::testing::random_word(rng, 3, 6)});
    RetrievalConfig seq;
    seq.workers = 1;
    RetrievalConfig par;
    par.workers = 8;
    auto a = run_retrieval(subs, retriever, reranker, seq);
    auto b = run_retrieval(subs, retriever, reranker, par);
    EXPECT_EQ(a.context, b.context);
    EXPECT_LE(a.context.size(), 12u * 10u);
    ASSERT_EQ(a.per_subquery.size(), 12u);
    for (const auto& s : a.per_subquery) {
        EXPECT_EQ(s.retrieved.size(), 40u);
        EXPECT_EQ(s.kept.size(), 10u);
    }
}

TEST(RetrievalConfig, Validation) {
    RetrievalConfig c;
    c.k = 41;
    EXPECT_THROW(c.validate(), ArgumentError);
    c = {};
    c.max_subqueries = 0;
    EXPECT_THROW(c.validate(), ArgumentError);
    EXPECT_NO_THROW(RetrievalConfig{}.validate());
    EXPECT_EQ(reranker_kind_from_string("external"), RerankerKind::external);
    EXPECT_THROW(reranker_kind_from_string("bm25"), ArgumentError);
}

TEST(RetrievalJson, ContextRoundTrip) {
    QuestionContext ctx;
    ctx.sources.push_back(passage("a", "one", 0.25));
    ctx.sources.back().rerank_score = 0.5;
    ctx.sources.back().metadata["title"] = "T";
    ctx.sources.push_back(passage("b", "two", 0.125));
    EXPECT_EQ(question_context_from_json(to_json(ctx)), ctx);
}
