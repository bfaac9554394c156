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

#include "oncoagent/cli/config.hpp"

#include "oncoagent/common/fs.hpp"
#include "oncoagent/common/toml.hpp"

#include <set>

namespace oncoagent::cli {

using nlohmann::json;

namespace {

// Reads typed keys from one table and reports the ones nobody asked for.
class Table {
public:
    Table(const json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) throw UsageError("config: " + label() + " must be a table");
    }

    template <typename T>
    void get(const std::string& key, T& into) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            into = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw UsageError("config: " + label(key) + " has the wrong type");
        }
    }

    void path(const std::string& key, std::filesystem::path& into, const std::filesystem::path& base) {
        std::string s;
        get(key, s);
        if (!s.empty()) into = fs::resolve(base, s);
    }

    void optional_path(const std::string& key, std::optional<std::filesystem::path>& into,
                       const std::filesystem::path& base) {
        std::string s;
        get(key, s);
        if (!s.empty()) into = fs::resolve(base, s);
    }

    std::optional<Table> sub(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) return std::nullopt;
        return Table(j_.at(key), label(key));
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) throw UsageError("config: unknown key " + label(key));
        }
    }

private:
    std::string label(const std::string& key = {}) const {
        if (key.empty()) return name_.empty() ? "top level" : name_;
        return name_.empty() ? key : name_ + "." + key;
    }

    const json& j_;
    std::string name_;
    std::set<std::string> seen_;
};

void service(Table& t, std::string& endpoint, std::string& api_key_env, int& retries) {
    t.get("endpoint", endpoint);
    t.get("api_key_env", api_key_env);
    t.get("retries", retries);
}

} // namespace

void EngineConfig::validate() const {
    if (!(run.temperature >= 0.0 && run.temperature <= 2.0)) {
        throw UsageError("config: temperature must be within [0, 2]");
    }
    if (run.max_calls < 1) throw UsageError("config: max_calls must be at least 1");
    if (run.refusal_attempts < 1) throw UsageError("config: refusal_attempts must be at least 1");
    if (run.executor.workers < 1) throw UsageError("config: executor_workers must be at least 1");
    if (http_timeout_seconds < 1) throw UsageError("config: http_timeout_seconds must be at least 1");
    if (mock_dimension < 1) throw UsageError("config: embedding.mock_dimension must be at least 1");
    for (int r : {chat.retries, embedding.retries, reranker.retries, google.retries, pubmed.retries, oncokb.retries,
                  segmentation.retries, histology.retries}) {
        if (r < 1) throw UsageError("config: retries must be at least 1");
    }
    try {
        run.validate();
    } catch (const ArgumentError& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
}

EngineConfig engine_config_from_json(const json& j, const std::filesystem::path& base_dir) {
    EngineConfig c;
    Table top(j, "");
    top.get("offline", c.offline);
    top.get("temperature", c.run.temperature);
    top.get("text_model", c.run.text_model);
    top.get("vision_model", c.vision_model);
    top.get("max_calls", c.run.max_calls);
    top.get("refusal_attempts", c.run.refusal_attempts);
    top.get("executor_workers", c.run.executor.workers);
    top.get("http_timeout_seconds", c.http_timeout_seconds);
    top.path("templates", c.templates_dir, base_dir);

    if (auto t = top.sub("retrieval")) {
        std::string reranker = retrieval::to_string(c.run.retrieval.reranker);
        t->get("n", c.run.retrieval.n);
        t->get("k", c.run.retrieval.k);
        t->get("max_subqueries", c.run.retrieval.max_subqueries);
        t->get("workers", c.run.retrieval.workers);
        t->get("reranker", reranker);
        try {
            c.run.retrieval.reranker = retrieval::reranker_kind_from_string(reranker);
        } catch (const ArgumentError& e) {
            throw UsageError(std::string("config: retrieval.reranker: ") + e.what());
        }
        t->finish();
    }
    if (auto t = top.sub("index")) {
        t->get("windows", c.index.windows);
        t->get("overlap", c.index.overlap);
        t->get("batch_size", c.index.batch_size);
        t->get("workers", c.index.workers);
        t->finish();
    }
    if (auto t = top.sub("chat")) {
        service(*t, c.chat.endpoint, c.chat.api_key_env, c.chat.retries);
        t->finish();
    }
    if (auto t = top.sub("embedding")) {
        service(*t, c.embedding.endpoint, c.embedding.api_key_env, c.embedding.retries);
        t->get("model", c.embedding.model);
        t->get("dimension", c.embedding.dimension);
        t->get("mock_dimension", c.mock_dimension);
        t->finish();
    }
    if (auto t = top.sub("reranker")) {
        service(*t, c.reranker.endpoint, c.reranker.api_key_env, c.reranker.retries);
        t->get("model", c.reranker.model);
        t->finish();
    }
    if (auto t = top.sub("google")) {
        service(*t, c.google.endpoint, c.google.api_key_env, c.google.retries);
        t->get("engine_id_env", c.google.engine_id_env);
        t->get("max_results", c.web_max_results);
        t->finish();
    }
    if (auto t = top.sub("pubmed")) {
        t->get("base_url", c.pubmed.base_url);
        t->get("api_key_env", c.pubmed.api_key_env);
        t->get("retries", c.pubmed.retries);
        t->get("max_results", c.pubmed_max_results);
        t->finish();
    }
    if (auto t = top.sub("oncokb")) {
        service(*t, c.oncokb.endpoint, c.oncokb.api_key_env, c.oncokb.retries);
        t->finish();
    }
    for (auto [name, settings] : {std::pair{"segmentation", &c.segmentation}, std::pair{"histology", &c.histology}}) {
        if (auto t = top.sub(name)) {
            service(*t, settings->endpoint, settings->api_key_env, settings->retries);
            t->path("output_dir", settings->output_dir, base_dir);
            t->finish();
        }
    }
    if (auto t = top.sub("offline_data")) {
        t->optional_path("script", c.script, base_dir);
        t->optional_path("mocks", c.mocks, base_dir);
        t->finish();
    }
    top.finish();
    c.run.pubmed_index = c.index;
    c.validate();
    return c;
}

EngineConfig load_engine_config(const std::filesystem::path& path) {
    std::string text = fs::read_file(path);
    json j;
    if (path.extension() == ".json") {
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ParseError(path.string() + ": " + e.what(), e.byte);
        }
    } else {
        j = toml::parse(text);
    }
    return engine_config_from_json(j, path.parent_path());
}

} // namespace oncoagent::cli
