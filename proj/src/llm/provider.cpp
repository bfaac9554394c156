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

#include "oncoagent/llm/provider.hpp"

#include "oncoagent/common/error.hpp"
#include "oncoagent/common/fs.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>

namespace oncoagent::llm {

using nlohmann::json;

namespace {
thread_local std::string t_scope;
} // namespace

const std::string& current_call_scope() { return t_scope; }

ScopedCallContext::ScopedCallContext(std::string scope) : previous_(std::move(t_scope)) {
    t_scope = std::move(scope);
}

ScopedCallContext::~ScopedCallContext() { t_scope = std::move(previous_); }

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::now();
    auto t = std::chrono::system_clock::to_time_t(now);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()) % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[40];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[48];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms.count()));
    return out;
}

// ---------------------------------------------------------------- scripted

std::shared_ptr<ScriptedProvider> ScriptedProvider::from_json(const json& script) {
    if (!script.is_object()) throw ArgumentError("provider script must be a JSON object");
    auto provider = std::make_shared<ScriptedProvider>();
    for (const auto& [tid, entry] : script.items()) {
        if (entry.is_string()) {
            provider->set_default(tid, entry.get<std::string>());
            continue;
        }
        if (!entry.is_array()) throw ArgumentError("script entry for " + tid + " must be string or array");
        for (const auto& raw : entry) {
            Item item;
            if (raw.is_string()) {
                item.response = raw.get<std::string>();
            } else if (raw.is_object()) {
                if (raw.contains("response")) item.response = raw.at("response").get<std::string>();
                if (raw.contains("error")) item.error = raw.at("error").get<std::string>();
                if (raw.contains("scope")) item.scope = raw.at("scope").get<std::string>();
                if (raw.contains("when")) {
                    for (const auto& [k, v] : raw.at("when").items()) item.when[k] = v.get<std::string>();
                }
                if (!item.response && !item.error) {
                    throw ArgumentError("script item for " + tid + " needs 'response' or 'error'");
                }
            } else {
                throw ArgumentError("bad script item for " + tid);
            }
            std::lock_guard lock(provider->mu_);
            provider->queues_[tid].push_back(std::move(item));
        }
    }
    return provider;
}

void ScriptedProvider::push(const std::string& template_id, std::string response) {
    std::lock_guard lock(mu_);
    queues_[template_id].push_back(Item{std::move(response), std::nullopt, {}, std::nullopt});
}

void ScriptedProvider::push_error(const std::string& template_id, std::string message) {
    std::lock_guard lock(mu_);
    queues_[template_id].push_back(Item{std::nullopt, std::move(message), {}, std::nullopt});
}

void ScriptedProvider::set_default(const std::string& template_id, std::string response) {
    std::lock_guard lock(mu_);
    defaults_[template_id] = std::move(response);
}

std::string ScriptedProvider::complete(const ChatRequest& request) {
    if (auto out = try_complete(request)) return *out;
    throw ProviderError("no scripted response for template " + request.template_id);
}

std::optional<std::string> ScriptedProvider::try_complete(const ChatRequest& request) {
    std::lock_guard lock(mu_);
    calls_.push_back(request);
    const auto& scope = current_call_scope();

    auto& queue = queues_[request.template_id];
    auto matches = [&](const Item& item) {
        if (item.scope && *item.scope != scope) return false;
        for (const auto& [var, needle] : item.when) {
            auto it = request.variables.find(var);
            if (it == request.variables.end() || it->second.find(needle) == std::string::npos) {
                return false;
            }
        }
        return true;
    };
    auto it = std::find_if(queue.begin(), queue.end(), matches);
    if (it != queue.end()) {
        Item item = std::move(*it);
        queue.erase(it);
        if (item.error) throw ProviderError(*item.error);
        return *item.response;
    }
    if (auto d = defaults_.find(request.template_id); d != defaults_.end()) return d->second;
    return std::nullopt;
}

std::vector<ChatRequest> ScriptedProvider::calls() const {
    std::lock_guard lock(mu_);
    return calls_;
}

std::size_t ScriptedProvider::call_count(const std::string& template_id) const {
    std::lock_guard lock(mu_);
    return static_cast<std::size_t>(std::count_if(
        calls_.begin(), calls_.end(), [&](const ChatRequest& r) { return r.template_id == template_id; }));
}

// ---------------------------------------------------------------- logging

json to_json(const CallRecord& r) {
    json j{{"scope", r.scope},       {"template_id", r.template_id}, {"model", r.model},
           {"temperature", r.temperature}, {"images", r.images},   {"variables", r.variables},
           {"response", r.response}, {"timestamp", r.timestamp}};
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

CallRecord call_record_from_json(const json& j) {
    CallRecord r;
    r.scope = j.value("scope", "");
    r.template_id = j.at("template_id").get<std::string>();
    r.model = j.value("model", "");
    r.temperature = j.value("temperature", kDefaultTemperature);
    r.images = j.value("images", std::vector<std::string>{});
    r.variables = j.value("variables", std::map<std::string, std::string>{});
    r.response = j.value("response", "");
    r.error = j.value("error", "");
    r.timestamp = j.value("timestamp", "");
    return r;
}

void CallLog::append(CallRecord record) {
    std::lock_guard lock(mu_);
    records_.push_back(std::move(record));
}

std::vector<CallRecord> CallLog::records() const {
    std::lock_guard lock(mu_);
    return records_;
}

std::size_t CallLog::size() const {
    std::lock_guard lock(mu_);
    return records_.size();
}

void CallLog::sort_tail(std::size_t from,
                        const std::function<bool(const CallRecord&, const CallRecord&)>& less) {
    std::lock_guard lock(mu_);
    if (from >= records_.size()) return;
    std::stable_sort(records_.begin() + static_cast<std::ptrdiff_t>(from), records_.end(), less);
}

std::string LoggingProvider::complete(const ChatRequest& request) {
    CallRecord record;
    record.scope = current_call_scope();
    record.template_id = request.template_id;
    record.model = request.model;
    record.temperature = request.temperature;
    record.variables = request.variables;
    for (const auto& img : request.images) record.images.push_back(img.filename().string());
    record.timestamp = utc_timestamp();
    try {
        record.response = inner_->complete(request);
    } catch (const std::exception& e) {
        record.error = e.what();
        log_->append(std::move(record));
        throw;
    }
    std::string response = record.response;
    log_->append(std::move(record));
    return response;
}

// ---------------------------------------------------------------- templates

TemplateStore::TemplateStore(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError("template directory not found: " + dir.string());
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".tmpl") {
            add(entry.path().stem().string(), fs::read_file(entry.path()));
        }
    }
}

void TemplateStore::add(const std::string& id, std::string body) { templates_[id] = std::move(body); }

bool TemplateStore::has(const std::string& id) const { return templates_.count(id) > 0; }

std::vector<std::string> TemplateStore::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : templates_) out.push_back(id);
    return out;
}

std::string TemplateStore::render(const std::string& id,
                                  const std::map<std::string, std::string>& vars) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) throw ArgumentError("unknown prompt template " + id);
    const std::string& body = it->second;
    std::string out;
    std::size_t pos = 0;
    while (pos < body.size()) {
        auto open = body.find("{{", pos);
        if (open == std::string::npos) {
            out.append(body, pos);
            break;
        }
        auto close = body.find("}}", open + 2);
        if (close == std::string::npos) {
            out.append(body, pos);
            break;
        }
        out.append(body, pos, open - pos);
        std::string name = body.substr(open + 2, close - open - 2);
        if (auto v = vars.find(name); v != vars.end()) {
            out += v->second;
        } else {
            out.append(body, open, close + 2 - open);
        }
        pos = close + 2;
    }
    return out;
}

// ---------------------------------------------------------------- remote

RemoteChatProvider::RemoteChatProvider(std::shared_ptr<http::Transport> transport,
                                       RemoteChatSettings settings,
                                       std::shared_ptr<const TemplateStore> templates)
    : transport_(std::move(transport)), settings_(std::move(settings)), templates_(std::move(templates)) {}

json RemoteChatProvider::build_body(const ChatRequest& request) const {
    std::string prompt = templates_->render(request.template_id, request.variables);
    json content;
    if (request.images.empty()) {
        content = prompt;
    } else {
        content = json::array({json{{"type", "text"}, {"text", prompt}}});
        for (const auto& img : request.images) {
            auto bytes = fs::read_file(img);
            auto ext = img.extension().string();
            std::string mime = (ext == ".jpg" || ext == ".jpeg") ? "image/jpeg" : "image/png";
            content.push_back({{"type", "image_url"},
                               {"image_url", {{"url", "data:" + mime + ";base64," +
                                                          http::base64_encode(bytes)}}}});
        }
    }
    return json{{"model", request.model},
                {"temperature", request.temperature},
                {"messages", json::array({json{{"role", "user"}, {"content", content}}})}};
}

std::string RemoteChatProvider::complete(const ChatRequest& request) {
    const char* key = std::getenv(settings_.api_key_env.c_str());
    if (!key || !*key) throw ProviderError("environment variable " + settings_.api_key_env + " is not set");

    http::Request req;
    req.url = settings_.endpoint;
    req.headers = {{"Authorization", std::string("Bearer ") + key}, {"Content-Type", "application/json"}};
    req.body = build_body(request).dump();

    auto res = http::send_with_retries(*transport_, req, settings_.retries);
    if (!res.ok()) throw ProviderError("chat endpoint returned HTTP " + std::to_string(res.status));
    try {
        auto body = json::parse(res.body);
        return body.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw ProviderError(std::string("malformed chat completion response: ") + e.what());
    }
}

} // namespace oncoagent::llm
