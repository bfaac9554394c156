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

#include "oncoagent/cli/app.hpp"

#include "oncoagent/agent/case.hpp"
#include "oncoagent/agent/offline.hpp"
#include "oncoagent/agent/pipeline.hpp"
#include "oncoagent/cli/config.hpp"
#include "oncoagent/common/error.hpp"
#include "oncoagent/common/fs.hpp"
#include "oncoagent/corpus/corpus.hpp"
#include "oncoagent/eval/eval.hpp"
#include "oncoagent/index/builder.hpp"
#include "oncoagent/tools/builtin.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <functional>
#include <iostream>
#include <optional>

#ifndef ONCOAGENT_DEFAULT_TEMPLATE_DIR
#define ONCOAGENT_DEFAULT_TEMPLATE_DIR "templates"
#endif

namespace oncoagent::cli {

using nlohmann::json;
namespace stdfs = std::filesystem;

namespace {

// Routes the default logger to `err` for the lifetime of one invocation.
class LoggerScope {
public:
    LoggerScope(std::ostream& err, spdlog::level::level_enum level) : previous_(spdlog::default_logger()) {
        auto logger = std::make_shared<spdlog::logger>("oncoagent", std::make_shared<spdlog::sinks::ostream_sink_mt>(err));
        logger->set_pattern("%l: %v");
        logger->set_level(level);
        spdlog::set_default_logger(logger);
    }
    ~LoggerScope() { spdlog::set_default_logger(previous_); }
    LoggerScope(const LoggerScope&) = delete;
    LoggerScope& operator=(const LoggerScope&) = delete;

private:
    std::shared_ptr<spdlog::logger> previous_;
};

void write_json(const stdfs::path& path, const json& j) { fs::write_file_atomic(path, j.dump(2) + "\n"); }

json read_json(const stdfs::path& path) {
    try {
        return json::parse(fs::read_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what(), e.byte);
    }
}

EngineConfig engine_config(const std::string& path, bool offline) {
    EngineConfig c = path.empty() ? EngineConfig{} : load_engine_config(path);
    if (offline) c.offline = true;
    if (c.templates_dir.empty()) c.templates_dir = ONCOAGENT_DEFAULT_TEMPLATE_DIR;
    c.validate();
    return c;
}

stdfs::path parent_or_dot(const stdfs::path& p) {
    auto parent = p.parent_path();
    return parent.empty() ? stdfs::path(".") : parent;
}

std::optional<stdfs::path> pick(const std::string& flag, const std::optional<stdfs::path>& configured,
                                const stdfs::path& fallback) {
    if (!flag.empty()) return stdfs::path(flag);
    if (configured) return configured;
    if (stdfs::exists(fallback)) return fallback;
    return std::nullopt;
}

struct CorpusIngestArgs {
    std::string in, format = "tei", source = "custom", out;
};
struct CorpusFilterArgs {
    std::string in, keywords, out;
};
struct IndexBuildArgs {
    std::string corpus, out, config;
    std::vector<int> windows;
    std::optional<int> overlap;
    bool offline = false;
};
struct AgentRunArgs {
    std::string case_file, index, config, script, mocks, plan, out;
    bool offline = false;
};
struct ReplayArgs {
    std::string transcript, out;
};
struct EvalArgs {
    std::string annotations, out;
};

} // namespace

App::App(std::shared_ptr<http::Transport> transport) : App(std::move(transport), std::cout, std::cerr) {}

App::App(std::shared_ptr<http::Transport> transport, std::ostream& out, std::ostream& err)
    : transport_(std::move(transport)), out_(out), err_(err) {}

http::Transport& App::transport() {
    if (!transport_) transport_ = std::make_shared<http::HttplibTransport>();
    return *transport_;
}

int App::run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

int App::run(const std::vector<std::string>& args) {
    CLI::App app{"Tool-using oncology agent with retrieval-augmented, cited answers", "oncoagent"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);
    bool verbose = false;
    bool quiet = false;
    app.add_flag("-v,--verbose", verbose, "Debug logging");
    app.add_flag("-q,--quiet", quiet, "Errors only");

    std::function<int()> action;
    auto shared_transport = [this]() {
        transport();
        return transport_;
    };

    // corpus
    auto* corpus_cmd = app.add_subcommand("corpus", "Build the curated document corpus");
    corpus_cmd->require_subcommand(1);
    CorpusIngestArgs ingest;
    auto* ingest_cmd = corpus_cmd->add_subcommand("ingest", "Ingest a directory of source documents");
    ingest_cmd->add_option("--in", ingest.in, "Input directory")->required()->check(CLI::ExistingDirectory);
    ingest_cmd->add_option("--format", ingest.format, "Input format")
        ->check(CLI::IsMember({"tei", "jsonl", "text"}))
        ->capture_default_str();
    ingest_cmd->add_option("--source", ingest.source, "Source tag for the documents")
        ->check(CLI::IsMember({"mdcalc", "uptodate", "meditron", "asco", "esmo", "onkopedia", "custom"}))
        ->capture_default_str();
    ingest_cmd->add_option("--out", ingest.out, "Output jsonlines file")->required();
    ingest_cmd->callback([&] {
        action = [&] {
            corpus::IngestOptions options{corpus::input_format_from_string(ingest.format),
                                          corpus::source_from_string(ingest.source)};
            auto docs = corpus::ingest_directory(ingest.in, options);
            corpus::archive_jsonl(docs, ingest.out);
            out_ << "ingested " << docs.size() << " documents into " << ingest.out << "\n";
            return kExitOk;
        };
    });

    CorpusFilterArgs filter;
    auto* filter_cmd = corpus_cmd->add_subcommand("filter", "Keep documents mentioning any keyword");
    filter_cmd->add_option("--in", filter.in, "Corpus jsonlines file")->required()->check(CLI::ExistingFile);
    filter_cmd->add_option("--keywords", filter.keywords, "Keyword file, one per line")
        ->required()
        ->check(CLI::ExistingFile);
    filter_cmd->add_option("--out", filter.out, "Output jsonlines file")->required();
    filter_cmd->callback([&] {
        action = [&] {
            auto docs = corpus::load_jsonl(filter.in);
            auto kept = corpus::keyword_filter(docs, corpus::load_keywords(filter.keywords));
            corpus::archive_jsonl(kept, filter.out);
            out_ << "kept " << kept.size() << " of " << docs.size() << " documents\n";
            return kExitOk;
        };
    });

    // index
    auto* index_cmd = app.add_subcommand("index", "Chunk and embed a corpus");
    index_cmd->require_subcommand(1);
    IndexBuildArgs build;
    auto* build_cmd = index_cmd->add_subcommand("build", "Build a vector index from a corpus file");
    build_cmd->add_option("--corpus", build.corpus, "Corpus jsonlines file")->required()->check(CLI::ExistingFile);
    build_cmd->add_option("--out", build.out, "Index file")->required();
    build_cmd->add_option("--windows", build.windows, "Chunk windows in tokens")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    build_cmd->add_option("--overlap", build.overlap, "Overlap in tokens")->check(CLI::NonNegativeNumber);
    build_cmd->add_option("--config", build.config, "Engine config (.toml or .json)")->check(CLI::ExistingFile);
    build_cmd->add_flag("--offline", build.offline, "Use the deterministic hash embedder");
    build_cmd->callback([&] {
        action = [&] {
            auto config = engine_config(build.config, build.offline);
            auto options = config.index;
            if (!build.windows.empty()) options.windows = build.windows;
            if (build.overlap) options.overlap = *build.overlap;
            std::shared_ptr<index::EmbeddingProvider> embedder;
            if (config.offline) {
                embedder = std::make_shared<index::MockEmbeddingProvider>(config.mock_dimension);
            } else {
                embedder = std::make_shared<index::RemoteEmbeddingProvider>(shared_transport(), config.embedding);
            }
            auto docs = corpus::load_jsonl(build.corpus);
            auto idx = index::build_index(docs, *embedder, options);
            idx.persist(build.out);
            out_ << "indexed " << idx.size() << " chunks from " << docs.size() << " documents (" << idx.model()
                 << ", dimension " << idx.dimension() << ") into " << build.out << "\n";
            return kExitOk;
        };
    });

    // agent
    auto* agent_cmd = app.add_subcommand("agent", "Run or replay patient cases");
    agent_cmd->require_subcommand(1);
    AgentRunArgs run;
    auto* run_cmd = agent_cmd->add_subcommand("run", "Answer a patient case");
    run_cmd->add_option("--case", run.case_file, "Case file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--index", run.index, "Index file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--config", run.config, "Engine config (.toml or .json)")->check(CLI::ExistingFile);
    run_cmd->add_flag("--offline", run.offline, "Mock every model and service; no network access");
    run_cmd->add_option("--script", run.script, "Scripted model outputs (JSON)")->check(CLI::ExistingFile);
    run_cmd->add_option("--mocks", run.mocks, "Mock service data (JSON)")->check(CLI::ExistingFile);
    run_cmd->add_option("--plan", run.plan, "Run this plan instead of asking the planner")->check(CLI::ExistingFile);
    run_cmd->add_option("--out", run.out, "Transcript file (default <case_id>.transcript.json)");
    run_cmd->callback([&] {
        action = [&] {
            auto config = engine_config(run.config, run.offline);
            auto patient = agent::load_case(run.case_file);
            auto case_dir = parent_or_dot(run.case_file);
            agent::check_attachments(patient, case_dir);
            auto idx = index::VectorIndex::load(run.index);
            if (!run.plan.empty()) config.run.forced_plan = tools::plan_from_json(read_json(run.plan));

            auto log = std::make_shared<llm::CallLog>();
            std::shared_ptr<llm::ScriptedProvider> script;
            if (auto p = pick(run.script, config.script, case_dir / "script.json")) {
                script = llm::ScriptedProvider::from_json(read_json(*p));
            }

            tools::ToolEnvironment env;
            env.base_dir = case_dir;
            env.vision_options.model = config.vision_model;
            env.vision_options.temperature = config.run.temperature;
            env.web_max_results = config.web_max_results;
            env.pubmed_max_results = config.pubmed_max_results;
            agent::Providers providers;
            providers.log = log;

            if (config.offline) {
                std::shared_ptr<llm::ChatProvider> model = std::make_shared<agent::OfflineProvider>();
                if (!script) script = std::make_shared<llm::ScriptedProvider>();
                model = std::make_shared<agent::FallbackProvider>(script, model);
                auto mocks_path = pick(run.mocks, config.mocks, case_dir / "mocks.json");
                auto mocks = mocks_path ? tools::MockServices::load(*mocks_path)
                                        : tools::MockServices::from_json(json::object(), case_dir);
                env.web_search = mocks.web_search;
                env.pubmed = mocks.pubmed;
                env.oncokb = mocks.oncokb;
                env.segmentation = mocks.segmentation;
                env.histology = mocks.histology;
                env.vision = std::make_shared<llm::LoggingProvider>(model, log);
                providers.text = model;
                auto embedder = std::make_shared<index::MockEmbeddingProvider>(idx.dimension());
                if (idx.model() != embedder->model()) {
                    throw UsageError("index " + run.index + " was embedded with " + idx.model() +
                                     "; offline runs embed with " + embedder->model());
                }
                providers.embedder = embedder;
                config.run.retrieval.reranker = retrieval::RerankerKind::cosine;
            } else {
                auto t = shared_transport();
                auto templates = std::make_shared<llm::TemplateStore>(config.templates_dir);
                std::shared_ptr<llm::ChatProvider> model =
                    std::make_shared<llm::RemoteChatProvider>(t, config.chat, templates);
                if (script) model = std::make_shared<agent::FallbackProvider>(script, model);
                env.web_search = std::make_shared<tools::GoogleSearchClient>(t, config.google);
                env.pubmed = std::make_shared<tools::EutilsPubMedClient>(t, config.pubmed);
                env.oncokb = std::make_shared<tools::OncoKbHttpClient>(t, config.oncokb);
                if (!config.segmentation.endpoint.empty()) {
                    env.segmentation = std::make_shared<tools::HttpSegmentationClient>(t, config.segmentation);
                }
                if (!config.histology.endpoint.empty()) {
                    env.histology = std::make_shared<tools::HttpHistologyClient>(t, config.histology);
                }
                env.vision = std::make_shared<llm::LoggingProvider>(model, log);
                providers.text = model;
                auto embedder = std::make_shared<index::RemoteEmbeddingProvider>(t, config.embedding);
                if (idx.model() != embedder->model() || idx.dimension() != embedder->dimension()) {
                    throw UsageError("index " + run.index + " was embedded with " + idx.model() + " (dimension " +
                                     std::to_string(idx.dimension()) + "), the config uses " + embedder->model() +
                                     " (dimension " + std::to_string(embedder->dimension()) + ")");
                }
                providers.embedder = embedder;
                if (config.run.retrieval.reranker == retrieval::RerankerKind::external) {
                    providers.reranker = std::make_shared<retrieval::ExternalReranker>(t, config.reranker);
                }
            }

            auto registry = tools::make_builtin_registry(env);
            auto result = agent::run_case(patient, registry, idx, config.run, providers);
            stdfs::path out = run.out.empty() ? stdfs::path(patient.case_id + ".transcript.json") : stdfs::path(run.out);
            write_json(out, result.transcript);
            if (result.status != agent::RunStatus::completed) {
                err_ << "error: run " << agent::to_string(result.status) << ": " << result.error << "\n"
                     << "transcript: " << out.string() << "\n";
                return kExitFailure;
            }
            out_ << result.text << "\n";
            return kExitOk;
        };
    });

    ReplayArgs replay;
    auto* replay_cmd = agent_cmd->add_subcommand("replay", "Re-run a transcript from its recorded outputs");
    replay_cmd->add_option("--transcript", replay.transcript, "Transcript file")
        ->required()
        ->check(CLI::ExistingFile);
    replay_cmd->add_option("--out", replay.out, "Write the replayed transcript here");
    replay_cmd->callback([&] {
        action = [&] {
            auto result = agent::replay_transcript(read_json(replay.transcript));
            if (!replay.out.empty()) write_json(replay.out, result.replayed.transcript);
            if (!result.identical) {
                err_ << "replay differs from the recording:\n" << result.differences.dump(2) << "\n";
                return kExitFailure;
            }
            out_ << "replay identical (" << agent::to_string(result.replayed.status) << ")\n";
            return kExitOk;
        };
    });

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Score rater annotations");
    eval_cmd->require_subcommand(1);
    EvalArgs ev;
    auto* compute_cmd = eval_cmd->add_subcommand("compute", "Majority-vote metrics over annotation files");
    compute_cmd->add_option("--annotations", ev.annotations, "Annotation directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    compute_cmd->add_option("--out", ev.out, "Report file (JSON)")->required();
    compute_cmd->callback([&] {
        action = [&] {
            auto report = eval::compute_metrics(eval::load_annotations(ev.annotations));
            write_json(ev.out, eval::to_json(report));
            out_ << eval::render_table(report);
            return kExitOk;
        };
    });

    // tools
    auto* tools_cmd = app.add_subcommand("tools", "Inspect the tool registry");
    tools_cmd->require_subcommand(1);
    auto* list_cmd = tools_cmd->add_subcommand("list", "Print the function-calling schemas as JSON");
    list_cmd->callback([&] {
        action = [&] {
            auto registry = tools::make_builtin_registry(tools::ToolEnvironment{});
            out_ << registry.specs_json().dump(2) << "\n";
            return kExitOk;
        };
    });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out_, err_);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out_, err_);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out_, err_);
        return kExitUsage;
    }
    if (!action) {
        err_ << app.help();
        return kExitUsage;
    }

    LoggerScope logging(err_, verbose ? spdlog::level::debug : quiet ? spdlog::level::err : spdlog::level::info);
    try {
        return action();
    } catch (const UsageError& e) {
        err_ << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err_ << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

} // namespace oncoagent::cli
