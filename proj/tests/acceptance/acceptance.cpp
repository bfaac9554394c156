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

// Acceptance checks: one PASS/FAIL line per criterion, exit status 0 only
// when every criterion passes within its time budget.

#include "oncoagent/agent/pipeline.hpp"
#include "oncoagent/agent/stages.hpp"
#include "oncoagent/cli/app.hpp"
#include "oncoagent/common/fs.hpp"
#include "oncoagent/common/text.hpp"
#include "oncoagent/corpus/clean.hpp"
#include "oncoagent/corpus/corpus.hpp"
#include "oncoagent/eval/eval.hpp"
#include "oncoagent/index/chunk.hpp"
#include "oncoagent/index/embedding.hpp"
#include "oncoagent/index/tokenizer.hpp"
#include "oncoagent/index/vector_index.hpp"
#include "oncoagent/retrieval/retrieval.hpp"
#include "oncoagent/tools/builtin.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <unistd.h>

using namespace oncoagent;
using nlohmann::json;
namespace stdfs = std::filesystem;

namespace {

const stdfs::path kFixtures = ONCOAGENT_FIXTURE_DIR;
const stdfs::path kCaseDir = kFixtures / "cases" / "patient_x";

class Scratch {
public:
    explicit Scratch(const std::string& name)
        : path_(stdfs::temp_directory_path() / ("oncoagent-acceptance-" + std::to_string(::getpid()) + "-" + name)) {
        stdfs::remove_all(path_);
        stdfs::create_directories(path_);
    }
    ~Scratch() {
        std::error_code ec;
        stdfs::remove_all(path_, ec);
    }
    stdfs::path operator/(const std::string& name) const { return path_ / name; }

private:
    stdfs::path path_;
};

// Collects failed expectations; the first one becomes the report detail.
struct Checks {
    std::vector<std::string> failures;
    std::string summary;

    bool expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
        return ok;
    }
};

struct Invocation {
    int code = -1;
    std::string out;
    std::string err;
};

Invocation invoke(const std::vector<std::string>& args, const std::shared_ptr<http::Transport>& transport) {
    std::ostringstream out;
    std::ostringstream err;
    cli::App app(transport, out, err);
    Invocation r;
    r.code = app.run(args);
    r.out = out.str();
    r.err = err.str();
    return r;
}

json read_json(const stdfs::path& p) { return json::parse(fs::read_file(p)); }

std::string random_word(std::mt19937& rng, int lo = 3, int hi = 8) {
    std::uniform_int_distribution<int> len(lo, hi);
    std::uniform_int_distribution<int> letter(0, 25);
    std::string w;
    for (int i = len(rng); i > 0; --i) w += static_cast<char>('a' + letter(rng));
    return w;
}

// ---------------------------------------------------------------- metrics

void metrics_reproduction(Checks& c) {
    Scratch dir("metrics");
    auto transport = std::make_shared<http::RecordingTransport>();
    auto r = invoke({"eval", "compute", "--annotations", (kFixtures / "eval" / "annotations").string(), "--out",
                     (dir / "report.json").string()},
                    transport);
    if (!c.expect(r.code == 0, "eval compute exited " + std::to_string(r.code) + ": " + r.err)) return;
    auto m = read_json(dir / "report.json").at("metrics");
    struct Want {
        const char* name;
        int num, den;
        const char* percent;
    };
    const Want wants[] = {{"tool_use", 32, 33, "97.0"},          {"completeness", 63, 67, "94.0"},
                          {"helpfulness", 33, 37, "89.2"},       {"correctness", 131, 140, "93.6"},
                          {"wrongness", 6, 140, "4.3"},          {"harmfulness", 3, 140, "2.1"},
                          {"citation_correct", 141, 171, "82.5"}, {"citation_irrelevant", 11, 171, "6.4"},
                          {"citation_wrong", 3, 171, "1.8"}};
    for (const auto& w : wants) {
        const auto& got = m.at(w.name);
        c.expect(got.at("numerator") == w.num && got.at("denominator") == w.den,
                 std::string(w.name) + " is " + got.at("numerator").dump() + "/" + got.at("denominator").dump());
        c.expect(got.at("percent") == w.percent, std::string(w.name) + " renders " + got.at("percent").dump());
    }
    // 96.97 to two decimals is the same rational as 97.0 to one.
    c.expect(std::lround(32.0 / 33.0 * 10000) == 9697, "tool_use two-decimal value");
    c.expect(transport->count() == 0, "eval compute touched the network");
    c.summary = "tool_use 32/33, completeness 63/67, helpfulness 33/37, correctness 131/140, citations 141/11/3 of 171";
}

// ---------------------------------------------------------------- chunker

// Independent stride enumerator: candidate starts at k*(w-o); a candidate is
// kept when it covers a token no earlier kept chunk covered.
std::vector<std::pair<int, int>> stride_enumerate(int n, int w, int o) {
    std::vector<std::pair<int, int>> out;
    int covered_to = 0;
    for (int start = 0; start < n; start += w - o) {
        int end = std::min(n, start + w);
        if (end <= covered_to) continue;
        out.emplace_back(start, end - start);
        covered_to = end;
    }
    return out;
}

void chunker_oracle(Checks& c) {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> length(1, 5000);
    std::size_t chunks_checked = 0;
    for (int trial = 0; trial < 200 && c.failures.empty(); ++trial) {
        int n = trial == 0 ? 1 : trial == 1 ? 5000 : length(rng);
        corpus::CuratedDocument doc;
        doc.id = "d" + std::to_string(trial);
        std::vector<std::string> words;
        for (int i = 0; i < n; ++i) {
            words.push_back(random_word(rng, 1, 6));
            if (i) doc.text += (i % 17 == 0) ? "\n\n" : " ";
            doc.text += words.back();
        }
        auto chunks = index::chunk_document(doc, {512, 256, 128}, 50);
        for (int w : {512, 256, 128}) {
            std::vector<std::pair<int, int>> got;
            std::vector<int> cover(static_cast<std::size_t>(n), 0);
            for (const auto& ch : chunks) {
                if (ch.window != w) continue;
                got.emplace_back(ch.token_start, ch.token_len);
                for (int t = ch.token_start; t < ch.token_start + ch.token_len; ++t) ++cover[std::size_t(t)];
                // Chunk text is exactly its tokens.
                std::string expected;
                for (int t = ch.token_start; t < ch.token_start + ch.token_len; ++t) {
                    expected += (expected.empty() ? "" : " ") + words[std::size_t(t)];
                }
                if (!c.expect(text::collapse_whitespace(ch.text) == expected,
                              "chunk text differs from its tokens: " + ch.chunk_id)) {
                    return;
                }
                ++chunks_checked;
            }
            if (!c.expect(got == stride_enumerate(n, w, 50),
                          "spans differ for n=" + std::to_string(n) + " window=" + std::to_string(w))) {
                return;
            }
            c.expect(std::all_of(cover.begin(), cover.end(), [](int k) { return k >= 1; }),
                     "uncovered token for n=" + std::to_string(n) + " window=" + std::to_string(w));
        }
    }
    c.summary = "200 documents, " + std::to_string(chunks_checked) + " chunks match the stride enumerator";
}

// ---------------------------------------------------------------- retrieval

struct Scored {
    double score;
    std::string id;
};

std::vector<Scored> brute_rank(const std::vector<index::EmbeddingRecord>& records, const index::Vector& q) {
    std::vector<Scored> out;
    for (const auto& r : records) {
        double dot = 0, qq = 0, vv = 0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            dot += double(q[i]) * double(r.vector[i]);
            qq += double(q[i]) * double(q[i]);
            vv += double(r.vector[i]) * double(r.vector[i]);
        }
        out.push_back({dot / std::sqrt(qq * vv), r.chunk_id});
    }
    std::sort(out.begin(), out.end(),
              [](const Scored& a, const Scored& b) { return a.score != b.score ? a.score > b.score : a.id < b.id; });
    return out;
}

std::string dedup_key(const std::string& s) {
    std::string out;
    bool space = false;
    for (char ch : s) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            space = !out.empty();
            continue;
        }
        if (space) out += ' ';
        space = false;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    return out;
}

void retrieval_oracle(Checks& c) {
    std::mt19937 rng(99);
    index::MockEmbeddingProvider embedder(64);
    index::VectorIndex idx(embedder.dimension(), embedder.model());
    std::map<std::string, std::string> texts;
    std::vector<std::string> pool;
    for (int i = 0; i < 1000; ++i) {
        std::string t;
        if (i % 25 == 24) {
            // Case/whitespace variants of an earlier passage exercise dedup.
            t = "  " + text::to_lower(pool[std::size_t(i / 2)]) + "   ";
            t[2] = static_cast<char>(std::toupper(static_cast<unsigned char>(t[2])));
        } else {
            for (int w = 0; w < 6; ++w) t += (w ? " " : "") + random_word(rng);
        }
        pool.push_back(t);
        char id[16];
        std::snprintf(id, sizeof id, "c%04d", i);
        index::Chunk ch;
        ch.chunk_id = id;
        ch.doc_id = id;
        ch.text = t;
        ch.window = 128;
        ch.token_len = 6;
        texts[id] = t;
        idx.add(ch, embedder.embed_one(t));
    }
    auto records = idx.records();
    if (!c.expect(records.size() == 1000, "index holds " + std::to_string(records.size()) + " vectors")) return;

    retrieval::IndexRetriever retriever({&idx}, embedder);
    retrieval::CosineReranker reranker;
    retrieval::RetrievalConfig config; // n=40, k=10
    std::size_t sources_checked = 0;
    for (int q = 0; q < 100 && c.failures.empty(); ++q) {
        // Top-10 search.
        auto query_text = random_word(rng) + " " + pool[rng() % pool.size()].substr(0, 12);
        auto qv = embedder.embed_one(query_text);
        auto hits = idx.search(qv, 10);
        auto brute = brute_rank(records, qv);
        for (std::size_t i = 0; i < 10; ++i) {
            if (!c.expect(i < hits.size() && hits[i].chunk_id == brute[i].id,
                          "search rank " + std::to_string(i) + " differs for query " + std::to_string(q))) {
                return;
            }
        }

        // Full pipeline over 1-4 subqueries.
        std::vector<retrieval::Subquery> subs;
        int nsub = 1 + static_cast<int>(rng() % 4);
        for (int s = 0; s < nsub; ++s) subs.push_back({random_word(rng) + " " + random_word(rng)});
        auto result = retrieval::run_retrieval(subs, retriever, reranker, config);

        std::vector<std::string> expected;
        std::set<std::string> seen;
        for (const auto& s : subs) {
            auto ranked = brute_rank(records, embedder.embed_one(s.text));
            ranked.resize(40);
            // Cosine rerank keeps the order; keep the first 10.
            ranked.resize(10);
            for (const auto& r : ranked) {
                if (seen.insert(dedup_key(texts[r.id])).second) expected.push_back(r.id);
            }
        }
        std::vector<std::string> got;
        for (const auto& p : result.context.sources) got.push_back(p.chunk_id);
        c.expect(got == expected, "merged sources differ for query " + std::to_string(q));
        for (std::size_t s = 0; s < result.per_subquery.size(); ++s) {
            c.expect(result.per_subquery[s].retrieved.size() == 40 && result.per_subquery[s].kept.size() == 10,
                     "per-subquery list sizes");
        }
        sources_checked += got.size();
    }
    c.summary = "100 queries, top-10 and " + std::to_string(sources_checked) + " merged sources match brute force";
}

// ---------------------------------------------------------------- golden run

stdfs::path build_offline_index(const Scratch& dir, const std::shared_ptr<http::Transport>& transport, Checks& c) {
    auto corpus = (dir / "corpus.jsonl").string();
    auto index = dir / "index.bin";
    auto a = invoke({"corpus", "ingest", "--in", (kFixtures / "corpus" / "guidelines").string(), "--format", "text",
                     "--out", corpus},
                    transport);
    c.expect(a.code == 0, "corpus ingest: " + a.err);
    auto b = invoke({"index", "build", "--corpus", corpus, "--out", index.string(), "--offline"}, transport);
    c.expect(b.code == 0, "index build: " + b.err);
    return index;
}

std::vector<std::string> run_args(const stdfs::path& index, const stdfs::path& out) {
    return {"agent", "run", "--offline", "--case", (kCaseDir / "case.json").string(), "--index", index.string(),
            "--out", out.string()};
}

const json* find_tool_result(const json& t, const std::string& call_id) {
    for (const auto& r : t.at("tool_results")) {
        if (r.at("call_id") == call_id) return &r;
    }
    return nullptr;
}

void golden_run(Checks& c) {
    Scratch dir("golden");
    auto transport = std::make_shared<http::RecordingTransport>();
    auto index_path = build_offline_index(dir, transport, c);
    if (!c.failures.empty()) return;

    std::vector<std::string> stripped;
    json transcript;
    for (int i = 0; i < 3; ++i) {
        auto out = dir / ("transcript" + std::to_string(i) + ".json");
        auto r = invoke(run_args(index_path, out), transport);
        if (!c.expect(r.code == 0, "agent run exited " + std::to_string(r.code) + ": " + r.err)) return;
        transcript = read_json(out);
        stripped.push_back(agent::strip_timestamps(transcript).dump(2));
    }
    c.expect(stripped[0] == stripped[1] && stripped[1] == stripped[2], "transcripts differ between runs");
    c.expect(transport->count() == 0, "offline run sent network requests");

    double ratio = NAN;
    if (const json* r = find_tool_result(transcript, "ratio"); r && r->at("status") == "ok") {
        ratio = r->at("output").at("value").get<double>();
    }
    c.expect(std::fabs(ratio - 3.89) <= 0.01, "segmentation-area ratio is " + std::to_string(ratio));

    // Citation -> provenance -> stored chunk (guideline index or the PubMed index of this run).
    auto idx = index::VectorIndex::load(index_path);
    std::vector<tools::ToolResult> results;
    for (const auto& r : transcript.at("tool_results")) results.push_back(tools::tool_result_from_json(r));
    index::MockEmbeddingProvider embedder(idx.dimension());
    auto config = agent::run_config_from_json(transcript.at("config"));
    auto pubmed = tools::build_pubmed_index(agent::pubmed_abstracts(results), embedder, config.pubmed_index);
    std::map<int, std::string> provenance;
    for (const auto& p : transcript.at("provenance")) provenance[p.at("source").get<int>()] = p.at("chunk_id");
    const auto& sources = transcript.at("sources");
    std::size_t citations = 0;
    for (const auto& st : transcript.at("cited_response").at("statements")) {
        for (const auto& n : st.at("citations")) {
            int number = n.get<int>();
            ++citations;
            auto it = provenance.find(number);
            if (!c.expect(it != provenance.end(), "Source " + std::to_string(number) + " has no provenance")) continue;
            const index::Chunk* chunk = idx.find_chunk(it->second);
            if (!chunk) chunk = pubmed.find_chunk(it->second);
            if (!c.expect(chunk != nullptr, "chunk " + it->second + " is not stored")) continue;
            c.expect(sources.at(std::size_t(number - 1)).at("text") == chunk->text,
                     "Source " + std::to_string(number) + " text differs from the stored chunk");
        }
    }
    c.expect(citations > 0, "response carries no citations");
    c.summary = "exit 0 x3, ratio " + text::format_fixed(ratio, 2) + ", " + std::to_string(citations) +
                " citations resolved, transcripts identical, 0 network requests";
}

// ---------------------------------------------------------------- plan cap and refusal

void plan_and_refusal(Checks& c) {
    Scratch dir("policies");
    auto transport = std::make_shared<http::RecordingTransport>();
    auto index_path = build_offline_index(dir, transport, c);
    if (!c.failures.empty()) return;

    // Eleven calls.
    json plan = json::array();
    for (int i = 0; i < 11; ++i) {
        plan.push_back({{"call_id", "c" + std::to_string(i)},
                        {"tool", "calculator"},
                        {"args", {{"op", "add"}, {"a", i}, {"b", 1}}}});
    }
    fs::write_file_atomic(dir / "plan11.json", plan.dump());
    auto args = run_args(index_path, dir / "t11.json");
    args.insert(args.end(), {"--plan", (dir / "plan11.json").string()});
    auto r = invoke(args, transport);
    c.expect(r.code == 1, "11-call plan exited " + std::to_string(r.code));
    auto t = read_json(dir / "t11.json");
    c.expect(t.at("status") == "failed", "11-call plan status " + t.at("status").dump());
    c.expect(t.at("error").is_string() && t.at("error").get<std::string>().find("10") != std::string::npos,
             "11-call plan error does not name the cap: " + t.at("error").dump());
    c.expect(!t.contains("tool_results") || t.at("tool_results").empty(), "tools ran for the 11-call plan");

    // Cycle.
    json cycle = json::array({{{"call_id", "a"}, {"tool", "calculator"}, {"args", {{"op", "add"}, {"a", "$b.value"}, {"b", 1}}}},
                              {{"call_id", "b"}, {"tool", "calculator"}, {"args", {{"op", "add"}, {"a", "$a.value"}, {"b", 1}}}}});
    fs::write_file_atomic(dir / "cycle.json", cycle.dump());
    args = run_args(index_path, dir / "tcycle.json");
    args.insert(args.end(), {"--plan", (dir / "cycle.json").string()});
    r = invoke(args, transport);
    c.expect(r.code == 1, "cyclic plan exited " + std::to_string(r.code));
    t = read_json(dir / "tcycle.json");
    auto error = t.at("error").is_string() ? text::to_lower(t.at("error").get<std::string>()) : std::string();
    c.expect(error.find("cycle") != std::string::npos, "cyclic plan error lacks a cycle diagnostic: " + error);
    c.expect(!t.contains("tool_results") || t.at("tool_results").empty(), "tools ran for the cyclic plan");

    // Vision refusal with a retry budget of one.
    auto script = read_json(kCaseDir / "script.json");
    script["vision_image.v1"] = "I'm sorry, but I can't assist with that request.";
    fs::write_file_atomic(dir / "script.json", script.dump());
    fs::write_file_atomic(dir / "engine.json", R"({"refusal_attempts": 1})");
    args = run_args(index_path, dir / "trefused.json");
    args.insert(args.end(), {"--script", (dir / "script.json").string(), "--config", (dir / "engine.json").string()});
    r = invoke(args, transport);
    c.expect(r.code == 1, "refused run exited " + std::to_string(r.code));
    if (c.expect(stdfs::exists(dir / "trefused.json"), "refused run left no transcript")) {
        t = read_json(dir / "trefused.json");
        c.expect(t.at("status") == "refused", "refused run status " + t.at("status").dump());
        c.expect(t.at("attempts").size() == 1, "refused run made more than one attempt");
        bool refused_tool = false;
        for (const auto& tr : t.at("tool_results")) refused_tool = refused_tool || tr.at("status") == "refused";
        c.expect(refused_tool, "transcript lacks the refused tool result");
        c.expect(agent::replay_transcript(t).identical, "refused transcript does not replay");
    }
    c.summary = "11-call plan rejected before execution, cycle diagnosed, refusal transcript preserved";
}

// ---------------------------------------------------------------- self-check bound

void self_check_bound(Checks& c) {
    Scratch dir("selfcheck");
    auto transport = std::make_shared<http::RecordingTransport>();
    auto index_path = build_offline_index(dir, transport, c);
    if (!c.failures.empty()) return;

    auto base = read_json(kCaseDir / "script.json");
    std::vector<std::pair<std::string, json>> scenarios{
        {"one unsupported pair", json::array({"unsupported", "supported", "supported", "supported", "supported"})},
        {"checker never satisfied", "unsupported"}};
    std::vector<std::string> notes;
    for (const auto& [label, checker] : scenarios) {
        auto script = base;
        script[agent::kCitationCheckTemplate] = checker;
        script[agent::kRepairTemplate] = "Encorafenib with cetuximab is recommended after progression [Source 2].";
        auto name = "script" + std::to_string(notes.size()) + ".json";
        fs::write_file_atomic(dir / name, script.dump());
        auto out = dir / ("t" + std::to_string(notes.size()) + ".json");
        auto args = run_args(index_path, out);
        args.insert(args.end(), {"--script", (dir / name).string()});
        auto r = invoke(args, transport);
        if (!c.expect(r.code == 0, label + ": exited " + std::to_string(r.code) + ": " + r.err)) continue;
        auto t = read_json(out);
        int generator = 0;
        for (const auto& call : t.at("provider_calls")) {
            generator += agent::is_generator_template(call.at("template_id").get<std::string>()) ? 1 : 0;
        }
        c.expect(generator == 2, label + ": generator invoked " + std::to_string(generator) + " times");
        c.expect(t.at("self_check").at("generator_calls") == 2, label + ": transcript generator_calls");
        c.expect(t.at("self_check").at("repaired") == true, label + ": no repair recorded");
        notes.push_back(label + " -> 2 generator calls");
    }
    c.summary = text::join(notes, "; ");
}

// ---------------------------------------------------------------- majority vote

std::string oracle_vote(const std::vector<std::string>& labels, const std::vector<std::string>& hierarchy) {
    std::map<std::string, int> counts;
    for (const auto& l : labels) ++counts[l];
    int top = 0;
    for (const auto& [l, n] : counts) top = std::max(top, n);
    std::string pick;
    for (const auto& h : hierarchy) {
        if (counts[h] == top) pick = h; // later = more adverse
    }
    return pick;
}

void majority_properties(Checks& c) {
    std::size_t multisets = 0;
    std::size_t orderings = 0;
    for (const auto* hierarchy : {&eval::kCitationHierarchy, &eval::kStatementHierarchy}) {
        const auto& h = *hierarchy;
        for (std::size_t a = 0; a < h.size(); ++a) {
            for (std::size_t b = a; b < h.size(); ++b) {
                for (std::size_t d = b; d < h.size(); ++d) {
                    for (std::size_t e = d; e < h.size(); ++e) {
                        std::vector<std::string> labels{h[a], h[b], h[d], h[e]};
                        auto expected = oracle_vote(labels, h);
                        std::sort(labels.begin(), labels.end());
                        do {
                            ++orderings;
                            c.expect(eval::majority_vote(labels, h) == expected,
                                     "vote differs from the oracle for " + text::join(labels, ","));
                        } while (std::next_permutation(labels.begin(), labels.end()));
                        ++multisets;
                    }
                }
            }
        }
        for (const auto& l : h) c.expect(eval::majority_vote({l, l, l, l}, h) == l, "unanimity for " + l);
    }
    c.expect(multisets == 30, "expected 15 multisets per hierarchy");
    c.expect(eval::majority_vote({"correct", "correct", "irrelevant", "irrelevant"}, eval::kCitationHierarchy) ==
                 "irrelevant",
             "adverse tie");
    c.expect(eval::majority_vote({"correct", "irrelevant", "wrong", "wrong"}, eval::kCitationHierarchy) == "wrong",
             "adverse plurality");
    c.expect(eval::majority_vote({"correct", "correct", "correct", "wrong"}, eval::kCitationHierarchy) == "correct",
             "plurality");
    c.summary = std::to_string(multisets) + " multisets, " + std::to_string(orderings) + " orderings";
}

// ---------------------------------------------------------------- corpus

void corpus_round_trips(Checks& c) {
    Scratch dir("corpus");
    std::mt19937 rng(31);
    std::vector<corpus::CuratedDocument> docs;
    std::size_t clean_checked = 0;
    for (int i = 0; i < 100; ++i) {
        corpus::SourceDocument src;
        src.id = "doc-" + std::to_string(i);
        src.source = static_cast<corpus::Source>(i % 7);
        src.title = random_word(rng) + " \xC3\xA9tude " + random_word(rng);
        if (i % 3 == 0) src.authors = {random_word(rng) + " " + random_word(rng), random_word(rng)};
        if (i % 4 == 0) src.published = "2023-0" + std::to_string(1 + i % 9) + "-15";
        if (i % 5 == 0) src.url = "https://example.org/" + random_word(rng);
        for (int s = static_cast<int>(rng() % 4); s >= 0; --s) {
            corpus::Section sec;
            sec.level = 1 + static_cast<int>(rng() % 3);
            sec.heading = random_word(rng);
            for (int p = static_cast<int>(rng() % 4); p > 0; --p) {
                std::string para;
                for (int w = 1 + static_cast<int>(rng() % 15); w > 0; --w) para += (para.empty() ? "" : " ") + random_word(rng);
                // Noise the cleaner has to remove.
                if (p % 2 == 0) para += " see http://10.0.0." + std::to_string(i) + "/x and 192.168.1.1 \x01 done";
                if (p % 3 == 0) para = "#" + para;
                sec.paragraphs.push_back(para);
            }
            src.sections.push_back(sec);
        }
        auto curated = corpus::normalize_structure(src);
        c.expect(corpus::clean_text(curated.text) == curated.text, "normalize_structure output changes under clean_text");
        ++clean_checked;
        docs.push_back(curated);
    }
    corpus::archive_jsonl(docs, dir / "corpus.jsonl");
    c.expect(corpus::load_jsonl(dir / "corpus.jsonl") == docs, "jsonlines round trip is not the identity");
    c.expect(corpus::load_jsonl(dir / "corpus.jsonl").size() == 100, "document count after round trip");

    std::string command = std::string("\"") + ONCOAGENT_CORPUS_TEST_BINARY + "\" --gtest_brief=1 > \"" +
                          (dir / "corpus_test.log").string() + "\" 2>&1";
    int status = std::system(command.c_str());
    c.expect(status == 0, "corpus unit tests failed (see corpus_test)");
    c.summary = "100 documents round-trip, " + std::to_string(clean_checked) +
                " normalized texts clean-idempotent, corpus unit tests pass";
}

struct Criterion {
    std::string name;
    double limit_seconds;
    std::function<void(Checks&)> run;
};

} // namespace

int main() {
    spdlog::set_level(spdlog::level::off);
    const std::vector<Criterion> criteria{
        {"metrics reproduction", 1.0, metrics_reproduction},
        {"chunker oracle", 10.0, chunker_oracle},
        {"retrieval oracle", 30.0, retrieval_oracle},
        {"end-to-end golden run", 10.0, golden_run},
        {"plan-cap and refusal policies", 30.0, plan_and_refusal},
        {"self-check bound", 30.0, self_check_bound},
        {"majority-vote properties", 1.0, majority_properties},
        {"corpus round-trips", 30.0, corpus_round_trips},
    };
    int failed = 0;
    for (const auto& criterion : criteria) {
        Checks checks;
        auto start = std::chrono::steady_clock::now();
        try {
            criterion.run(checks);
        } catch (const std::exception& e) {
            checks.failures.push_back(std::string("exception: ") + e.what());
        }
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (seconds > criterion.limit_seconds) {
            checks.failures.push_back("took " + text::format_fixed(seconds, 2) + " s, limit " +
                                      text::format_fixed(criterion.limit_seconds, 0) + " s");
        }
        bool pass = checks.failures.empty();
        failed += pass ? 0 : 1;
        std::cout << (pass ? "PASS" : "FAIL") << "  " << criterion.name << "  ("
                  << (pass ? checks.summary : checks.failures.front()) << "; " << text::format_fixed(seconds, 3)
                  << " s)\n";
    }
    std::cout << (failed ? "acceptance: " + std::to_string(failed) + " criteria failed" : std::string("acceptance: all criteria passed"))
              << std::endl;
    return failed ? 1 : 0;
}
