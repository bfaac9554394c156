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
#include "oncoagent/cli/app.hpp"
#include "oncoagent/cli/config.hpp"
#include "oncoagent/common/fs.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <sstream>

using namespace oncoagent;
using nlohmann::json;
using oncoagent::testing::TempDir;

namespace {

const std::filesystem::path kCaseDir = oncoagent::testing::fixture_dir() / "cases" / "patient_x";

struct Invocation {
    int code = -1;
    std::string out;
    std::string err;
};

Invocation invoke(const std::vector<std::string>& args, std::shared_ptr<http::Transport> transport = nullptr) {
    if (!transport) transport = std::make_shared<http::RecordingTransport>();
    std::ostringstream out;
    std::ostringstream err;
    cli::App app(transport, out, err);
    Invocation r;
    r.code = app.run(args);
    r.out = out.str();
    r.err = err.str();
    return r;
}

json read_json(const std::filesystem::path& p) { return json::parse(fs::read_file(p)); }

// Corpus + offline index for the patient X fixture.
std::filesystem::path offline_index(const TempDir& dir, const std::shared_ptr<http::Transport>& transport) {
    auto corpus = (dir / "corpus.jsonl").string();
    auto index = (dir / "index.bin").string();
    auto a = invoke({"corpus", "ingest", "--in", (oncoagent::testing::fixture_dir() / "corpus" / "guidelines").string(),
                  "--format", "text", "--out", corpus},
                 transport);
    EXPECT_EQ(a.code, 0) << a.err;
    auto b = invoke({"index", "build", "--corpus", corpus, "--out", index, "--offline"}, transport);
    EXPECT_EQ(b.code, 0) << b.err;
    return index;
}

} // namespace

TEST(CliUsage, UnknownInputsExitTwoWithUsage) {
    auto r = invoke({"frobnicate"});
    EXPECT_EQ(r.code, cli::kExitUsage);
    EXPECT_NE(r.err.find("Usage"), std::string::npos) << r.err;

    r = invoke({"eval", "compute", "--annotations", (oncoagent::testing::fixture_dir() / "eval" / "annotations").string(),
             "--out", "x.json", "--bogus"});
    EXPECT_EQ(r.code, cli::kExitUsage);
    EXPECT_NE(r.err.find("--bogus"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("Usage"), std::string::npos) << r.err;

    EXPECT_EQ(invoke({}).code, cli::kExitUsage);
    EXPECT_EQ(invoke({"agent"}).code, cli::kExitUsage);
    EXPECT_EQ(invoke({"agent", "run", "--case", "/nonexistent/case.json", "--index", "/nonexistent/i.bin"}).code,
              cli::kExitUsage);
    EXPECT_EQ(invoke({"corpus", "ingest", "--in", ".", "--format", "pdf", "--out", "x"}).code, cli::kExitUsage);
}

TEST(CliUsage, HelpExitsZero) {
    auto r = invoke({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("agent"), std::string::npos);
}

TEST(EngineConfigTest, ReadsTomlAndResolvesPaths) {
    TempDir dir;
    fs::write_file_atomic(dir / "engine.toml", R"(offline = true
temperature = 0.3
text_model = "gpt-4-test"

[retrieval]
n = 30
k = 5
reranker = "external"

[embedding]
model = "text-embedding-3-small"
dimension = 1536
mock_dimension = 32

[index]
windows = [256, 128]
overlap = 20

[offline_data]
script = "cases/script.json"
)");
    auto c = cli::load_engine_config(dir / "engine.toml");
    EXPECT_TRUE(c.offline);
    EXPECT_DOUBLE_EQ(c.run.temperature, 0.3);
    EXPECT_EQ(c.run.text_model, "gpt-4-test");
    EXPECT_EQ(c.run.retrieval.n, 30);
    EXPECT_EQ(c.run.retrieval.k, 5);
    EXPECT_EQ(c.run.retrieval.reranker, retrieval::RerankerKind::external);
    EXPECT_EQ(c.embedding.dimension, 1536u);
    EXPECT_EQ(c.mock_dimension, 32u);
    EXPECT_EQ(c.index.windows, (std::vector<int>{256, 128}));
    EXPECT_EQ(c.run.pubmed_index.overlap, 20);
    ASSERT_TRUE(c.script.has_value());
    EXPECT_EQ(*c.script, dir / "cases" / "script.json");
}

TEST(EngineConfigTest, Defaults) {
    auto c = cli::engine_config_from_json(json::object());
    EXPECT_FALSE(c.offline);
    EXPECT_DOUBLE_EQ(c.run.temperature, 0.1);
    EXPECT_EQ(c.run.text_model, "gpt-4-0125-preview");
    EXPECT_EQ(c.vision_model, "gpt-4-vision-preview");
    EXPECT_EQ(c.embedding.model, "text-embedding-3-large");
    EXPECT_EQ(c.embedding.dimension, 3072u);
    EXPECT_EQ(c.run.retrieval.n, 40);
    EXPECT_EQ(c.run.retrieval.k, 10);
    EXPECT_EQ(c.run.max_calls, 10);
}

TEST(EngineConfigTest, RejectsInvalidValues) {
    EXPECT_THROW(cli::engine_config_from_json({{"temperature", 2.5}}), cli::UsageError);
    EXPECT_THROW(cli::engine_config_from_json({{"temperature", -0.1}}), cli::UsageError);
    EXPECT_NO_THROW(cli::engine_config_from_json({{"temperature", 2.0}}));
    EXPECT_NO_THROW(cli::engine_config_from_json({{"temperature", 0.0}}));
    EXPECT_THROW(cli::engine_config_from_json({{"temprature", 0.2}}), cli::UsageError);
    EXPECT_THROW(cli::engine_config_from_json({{"retrieval", {{"k", 50}}}}), cli::UsageError);
    EXPECT_THROW(cli::engine_config_from_json({{"retrieval", {{"reranker", "magic"}}}}), cli::UsageError);
    EXPECT_THROW(cli::engine_config_from_json({{"chat", {{"retries", 0}}}}), cli::UsageError);
    EXPECT_THROW(cli::engine_config_from_json({{"offline", "yes"}}), cli::UsageError);

    TempDir dir;
    fs::write_file_atomic(dir / "hot.json", R"({"temperature": 3})");
    auto r = invoke({"index", "build", "--corpus", (dir / "hot.json").string(), "--out", (dir / "i.bin").string(),
                  "--config", (dir / "hot.json").string()});
    EXPECT_EQ(r.code, cli::kExitUsage);
    EXPECT_NE(r.err.find("temperature"), std::string::npos) << r.err;
}

TEST(CliAgent, OfflineRunIsDeterministicAndSilentOnTheNetwork) {
    TempDir dir;
    auto transport = std::make_shared<http::RecordingTransport>();
    auto index = offline_index(dir, transport);
    std::vector<json> transcripts;
    for (int i = 0; i < 3; ++i) {
        auto out = dir / ("t" + std::to_string(i) + ".json");
        auto r = invoke({"agent", "run", "--offline", "--case", (kCaseDir / "case.json").string(), "--index",
                      index.string(), "--out", out.string()},
                     transport);
        ASSERT_EQ(r.code, 0) << r.err;
        EXPECT_NE(r.out.find("3.89"), std::string::npos) << r.out;
        transcripts.push_back(read_json(out));
    }
    EXPECT_EQ(transport->count(), 0u);
    auto first = agent::strip_timestamps(transcripts[0]).dump();
    for (const auto& t : transcripts) EXPECT_EQ(agent::strip_timestamps(t).dump(), first);
    EXPECT_EQ(transcripts[0].at("status"), "completed");

    auto r = invoke({"agent", "replay", "--transcript", (dir / "t0.json").string()}, transport);
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(transport->count(), 0u);
}

TEST(CliAgent, OfflineRunWithoutScriptUsesHeuristicModels) {
    TempDir dir;
    auto transport = std::make_shared<http::RecordingTransport>();
    auto index = offline_index(dir, transport);
    auto c = read_json(kCaseDir / "case.json");
    for (auto& a : c["attachments"]) {
        if (a.contains("ref") && a["kind"] != "genomic_variant") {
            a["ref"] = (kCaseDir / a["ref"].get<std::string>()).string();
        }
    }
    fs::write_file_atomic(dir / "case.json", c.dump());
    auto out = dir / "t.json";
    auto r = invoke({"agent", "run", "--offline", "--case", (dir / "case.json").string(), "--mocks",
                  (kCaseDir / "mocks.json").string(), "--index", index.string(), "--out", out.string()},
                 transport);
    ASSERT_EQ(r.code, 0) << r.err;
    auto t = read_json(out);
    EXPECT_EQ(t.at("status"), "completed");
    EXPECT_FALSE(t.at("cited_response").at("statements").empty());
    EXPECT_EQ(transport->count(), 0u);
}

TEST(CliAgent, RefusedRunExitsOneAndKeepsTranscript) {
    TempDir dir;
    auto index = offline_index(dir, nullptr);
    auto script = read_json(kCaseDir / "script.json");
    script["vision_image.v1"] = "I'm sorry, but I can't help with that.";
    fs::write_file_atomic(dir / "script.json", script.dump());
    fs::write_file_atomic(dir / "engine.json", R"({"refusal_attempts": 1})");
    auto out = dir / "t.json";
    auto r = invoke({"agent", "run", "--offline", "--case", (kCaseDir / "case.json").string(), "--index", index.string(),
                  "--script", (dir / "script.json").string(), "--config", (dir / "engine.json").string(), "--out",
                  out.string()});
    EXPECT_EQ(r.code, cli::kExitFailure);
    EXPECT_NE(r.err.find("refused"), std::string::npos) << r.err;
    ASSERT_TRUE(std::filesystem::exists(out));
    EXPECT_EQ(read_json(out).at("status"), "refused");
}

TEST(CliAgent, OversizedPlanFileFailsTheRun) {
    TempDir dir;
    auto index = offline_index(dir, nullptr);
    json plan = json::array();
    for (int i = 0; i < 11; ++i) {
        plan.push_back({{"call_id", "c" + std::to_string(i)},
                        {"tool", "calculator"},
                        {"args", {{"op", "add"}, {"a", i}, {"b", 1}}}});
    }
    fs::write_file_atomic(dir / "plan.json", plan.dump());
    auto out = dir / "t.json";
    auto r = invoke({"agent", "run", "--offline", "--case", (kCaseDir / "case.json").string(), "--index", index.string(),
                  "--plan", (dir / "plan.json").string(), "--out", out.string()});
    EXPECT_EQ(r.code, cli::kExitFailure);
    EXPECT_EQ(read_json(out).at("status"), "failed");
}

TEST(CliAgent, TamperedTranscriptFailsReplay) {
    TempDir dir;
    auto index = offline_index(dir, nullptr);
    auto out = dir / "t.json";
    ASSERT_EQ(invoke({"agent", "run", "--offline", "--case", (kCaseDir / "case.json").string(), "--index",
                   index.string(), "--out", out.string()})
                  .code,
              0);
    auto t = read_json(out);
    t["final_response"] = "edited";
    fs::write_file_atomic(out, t.dump());
    auto r = invoke({"agent", "replay", "--transcript", out.string()});
    EXPECT_EQ(r.code, cli::kExitFailure);
    EXPECT_NE(r.err.find("final_response"), std::string::npos) << r.err;
}

TEST(CliAgent, CorruptIndexIsARuntimeFailure) {
    TempDir dir;
    fs::write_file_atomic(dir / "index.bin", "not an index");
    auto r = invoke({"agent", "run", "--offline", "--case", (kCaseDir / "case.json").string(), "--index",
                  (dir / "index.bin").string(), "--out", (dir / "t.json").string()});
    EXPECT_EQ(r.code, cli::kExitFailure);
    EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST(CliEval, ComputeWritesReport) {
    TempDir dir;
    auto out = dir / "report.json";
    auto r = invoke({"eval", "compute", "--annotations", (oncoagent::testing::fixture_dir() / "eval" / "annotations").string(),
                  "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    auto report = read_json(out);
    EXPECT_EQ(report["metrics"]["tool_use"]["numerator"], 32);
    EXPECT_EQ(report["metrics"]["tool_use"]["denominator"], 33);
    EXPECT_EQ(report["metrics"]["citation_correct"]["percent"], "82.5");
    EXPECT_NE(r.out.find("32/33"), std::string::npos);
}

TEST(CliTools, ListPrintsSchemas) {
    auto transport = std::make_shared<http::RecordingTransport>();
    auto r = invoke({"tools", "list"}, transport);
    ASSERT_EQ(r.code, 0) << r.err;
    auto specs = json::parse(r.out);
    ASSERT_TRUE(specs.is_array());
    std::set<std::string> names;
    for (const auto& s : specs) {
        names.insert(s.at("name").get<std::string>());
        EXPECT_EQ(s.at("parameters").at("type"), "object");
    }
    EXPECT_TRUE(names.count("calculator"));
    EXPECT_TRUE(names.count("oncokb_lookup"));
    EXPECT_EQ(transport->count(), 0u);
}

TEST(CliCorpus, FilterKeepsMatchingDocuments) {
    TempDir dir;
    auto corpus = (dir / "corpus.jsonl").string();
    ASSERT_EQ(invoke({"corpus", "ingest", "--in", (oncoagent::testing::fixture_dir() / "corpus" / "guidelines").string(),
                   "--format", "text", "--out", corpus})
                  .code,
              0);
    fs::write_file_atomic(dir / "kw.txt", "# targets\nROS1\n");
    auto r = invoke({"corpus", "filter", "--in", corpus, "--keywords", (dir / "kw.txt").string(), "--out",
                  (dir / "f.jsonl").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("kept"), std::string::npos);
    auto kept = fs::read_file(dir / "f.jsonl");
    EXPECT_NE(kept.find("ROS1"), std::string::npos);
}

TEST(CliIndex, OnlineBuildGoesThroughTheTransport) {
    TempDir dir;
    auto corpus = (dir / "corpus.jsonl").string();
    ASSERT_EQ(invoke({"corpus", "ingest", "--in", (oncoagent::testing::fixture_dir() / "corpus" / "guidelines").string(),
                   "--format", "text", "--out", corpus})
                  .code,
              0);
    fs::write_file_atomic(dir / "engine.toml", "[embedding]\nendpoint = \"https://embed.test/v1\"\ndimension = 4\n");
    auto transport = std::make_shared<http::RecordingTransport>([](const http::Request& req) {
        auto body = json::parse(req.body);
        json data = json::array();
        for (std::size_t i = 0; i < body.at("input").size(); ++i) {
            data.push_back({{"embedding", {1.0, static_cast<double>(i % 3), 0.5, 0.25}}});
        }
        return http::Response{200, json{{"data", data}}.dump()};
    });
    auto r = invoke({"index", "build", "--corpus", corpus, "--out", (dir / "i.bin").string(), "--config",
                  (dir / "engine.toml").string(), "--windows", "128", "--overlap", "10"},
                 transport);
    ASSERT_EQ(r.code, 0) << r.err;
    ASSERT_GT(transport->count(), 0u);
    for (const auto& req : transport->requests()) EXPECT_EQ(req.url, "https://embed.test/v1");
    EXPECT_NE(r.out.find("text-embedding-3-large"), std::string::npos) << r.out;

    // An index from another embedder cannot be searched offline.
    auto run = invoke({"agent", "run", "--offline", "--case", (kCaseDir / "case.json").string(), "--index",
                    (dir / "i.bin").string(), "--out", (dir / "t.json").string()});
    EXPECT_EQ(run.code, cli::kExitUsage);
    EXPECT_NE(run.err.find("embedded with"), std::string::npos) << run.err;
}
