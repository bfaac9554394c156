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

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace oncoagent::tools {

struct ParamSpec {
    std::string type; // string, number, integer, boolean, array, object
    std::string description;
    bool required = true;
    bool operator==(const ParamSpec&) const = default;
};

struct ToolSpec {
    std::string name;
    std::string description;
    std::map<std::string, ParamSpec> params;

    std::vector<std::string> required() const;
    /// Function-calling schema: {name, description, parameters: {type:
    /// "object", properties, required}}.
    nlohmann::json to_json() const;
    /// Throws ArgumentError naming the first missing or mistyped argument.
    void check_args(const nlohmann::json& args) const;
};

ToolSpec tool_spec_from_json(const nlohmann::json& j);

enum class ToolStatus { ok, error, refused };

std::string to_string(ToolStatus status);
ToolStatus tool_status_from_string(const std::string& s);

struct ToolCall {
    std::string call_id;
    std::string tool;
    nlohmann::json args = nlohmann::json::object();
    std::vector<std::string> depends_on;
    bool operator==(const ToolCall&) const = default;
};

struct ExecutionPlan {
    static constexpr int kDefaultMaxCalls = 10;

    std::vector<ToolCall> calls;
    int max_calls = kDefaultMaxCalls;
};

struct ToolResult {
    std::string call_id;
    std::string tool;
    ToolStatus status = ToolStatus::ok;
    nlohmann::json output;
    std::string summary;
    bool operator==(const ToolResult&) const = default;
};

/// What a tool returns on success. Tools signal failure by throwing;
/// RefusalError marks the call refused.
struct ToolOutput {
    nlohmann::json output;
    std::string summary;
};

class Tool {
public:
    virtual ~Tool() = default;
    virtual const ToolSpec& spec() const = 0;
    /// `args` has already been checked against spec() and substituted.
    virtual ToolOutput invoke(const nlohmann::json& args) = 0;
};

class ToolRegistry {
public:
    /// Throws IntegrityError for a duplicate name or a required parameter
    /// without a known type.
    void add(std::shared_ptr<Tool> tool);
    Tool* find(const std::string& name) const;
    std::vector<std::string> names() const;
    std::size_t size() const { return tools_.size(); }
    bool empty() const { return tools_.empty(); }
    /// Array of function-calling schemas, sorted by name.
    nlohmann::json specs_json() const;

private:
    std::map<std::string, std::shared_ptr<Tool>> tools_;
};

nlohmann::json to_json(const ToolCall& call);
ToolCall tool_call_from_json(const nlohmann::json& j);
/// Accepts a bare array of calls or {calls: [...], max_calls}.
ExecutionPlan plan_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExecutionPlan& plan);
nlohmann::json to_json(const ToolResult& result);
ToolResult tool_result_from_json(const nlohmann::json& j);

/// "[call_id] tool (status): summary" lines, the form tool outputs take in
/// prompts.
std::string summarize_results(const std::vector<ToolResult>& results);

} // namespace oncoagent::tools
