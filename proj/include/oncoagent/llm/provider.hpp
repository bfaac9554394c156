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

#include <nlohmann/json.hpp>

#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace oncoagent::llm {

inline constexpr double kDefaultTemperature = 0.1;
inline constexpr const char* kDefaultTextModel = "gpt-4-0125-preview";
inline constexpr const char* kDefaultVisionModel = "gpt-4-vision-preview";

/// One templated completion. Templates are versioned data files; providers
/// that talk to a real model render `template_id` with `variables`.
struct ChatRequest {
    std::string template_id;
    std::map<std::string, std::string> variables;
    std::string model = kDefaultTextModel;
    double temperature = kDefaultTemperature;
    std::vector<std::filesystem::path> images;
};

class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    /// Throws ProviderError (or TransportError) on failure.
    virtual std::string complete(const ChatRequest& request) = 0;
};

/// Thread-local label for the pipeline stage issuing provider calls.
/// Tool execution sets it to "tool:<call_id>" on the worker thread.
const std::string& current_call_scope();

class ScopedCallContext {
public:
    explicit ScopedCallContext(std::string scope);
    ~ScopedCallContext();
    ScopedCallContext(const ScopedCallContext&) = delete;
    ScopedCallContext& operator=(const ScopedCallContext&) = delete;

private:
    std::string previous_;
};

/// Answers from a script keyed by template id.
///
/// Script JSON: `{template_id: entry}` where an entry is either a string
/// (default response, reused whenever the queue is empty) or an array of
/// queue items. Queue items are strings or objects
/// `{"response"|"error": str, "when": {var: substring}, "scope": str}`;
/// the first unconsumed item whose conditions match is used.
class ScriptedProvider final : public ChatProvider {
public:
    ScriptedProvider() = default;

    static std::shared_ptr<ScriptedProvider> from_json(const nlohmann::json& script);

    void push(const std::string& template_id, std::string response);
    void push_error(const std::string& template_id, std::string message);
    void set_default(const std::string& template_id, std::string response);

    std::string complete(const ChatRequest& request) override;
    /// Like complete() but returns nullopt instead of throwing when nothing
    /// is scripted for the request. Scripted errors still throw.
    std::optional<std::string> try_complete(const ChatRequest& request);

    std::vector<ChatRequest> calls() const;
    std::size_t call_count(const std::string& template_id) const;

private:
    struct Item {
        std::optional<std::string> response;
        std::optional<std::string> error;
        std::map<std::string, std::string> when;
        std::optional<std::string> scope;
    };

    mutable std::mutex mu_;
    std::map<std::string, std::deque<Item>> queues_;
    std::map<std::string, std::string> defaults_;
    std::vector<ChatRequest> calls_;
};

struct CallRecord {
    std::string scope;
    std::string template_id;
    std::string model;
    double temperature = 0;
    std::vector<std::string> images;
    std::map<std::string, std::string> variables;
    std::string response;
    std::string error;
    std::string timestamp;
};

nlohmann::json to_json(const CallRecord& record);
CallRecord call_record_from_json(const nlohmann::json& j);

/// Thread-safe append-only log of provider calls.
class CallLog {
public:
    void append(CallRecord record);
    std::vector<CallRecord> records() const;
    std::size_t size() const;
    /// Stable-sorts records [from, size()) with `less`; used to canonicalize
    /// the order of calls made from concurrent tool workers.
    void sort_tail(std::size_t from,
                   const std::function<bool(const CallRecord&, const CallRecord&)>& less);

private:
    mutable std::mutex mu_;
    std::vector<CallRecord> records_;
};

/// Decorator recording every call (and its outcome) into a CallLog.
class LoggingProvider final : public ChatProvider {
public:
    LoggingProvider(std::shared_ptr<ChatProvider> inner, std::shared_ptr<CallLog> log)
        : inner_(std::move(inner)), log_(std::move(log)) {}

    std::string complete(const ChatRequest& request) override;

private:
    std::shared_ptr<ChatProvider> inner_;
    std::shared_ptr<CallLog> log_;
};

/// Prompt templates: `<dir>/<template_id>.tmpl`, placeholders `{{name}}`.
class TemplateStore {
public:
    TemplateStore() = default;
    explicit TemplateStore(const std::filesystem::path& dir);

    void add(const std::string& id, std::string body);
    bool has(const std::string& id) const;
    std::vector<std::string> ids() const;
    /// Unknown placeholders are left verbatim.
    std::string render(const std::string& id, const std::map<std::string, std::string>& vars) const;

private:
    std::map<std::string, std::string> templates_;
};

struct RemoteChatSettings {
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string api_key_env = "OPENAI_API_KEY";
    int retries = 3;
};

/// OpenAI-compatible chat-completions adapter. Images are sent inline as
/// base64 data URLs.
class RemoteChatProvider final : public ChatProvider {
public:
    RemoteChatProvider(std::shared_ptr<http::Transport> transport, RemoteChatSettings settings,
                       std::shared_ptr<const TemplateStore> templates);

    std::string complete(const ChatRequest& request) override;

    /// Request body for `request` (exposed for contract tests).
    nlohmann::json build_body(const ChatRequest& request) const;

private:
    std::shared_ptr<http::Transport> transport_;
    RemoteChatSettings settings_;
    std::shared_ptr<const TemplateStore> templates_;
};

std::string utc_timestamp();

} // namespace oncoagent::llm
