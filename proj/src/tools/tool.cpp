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

#include "oncoagent/tools/tool.hpp"

#include "oncoagent/common/error.hpp"

#include <set>

namespace oncoagent::tools {

using nlohmann::json;

namespace {

const std::set<std::string>& known_types() {
    static const std::set<std::string> types{"string", "number", "integer", "boolean", "array", "object"};
    return types;
}

bool has_type(const json& v, const std::string& type) {
    if (type == "string") return v.is_string();
    if (type == "number") return v.is_number();
    if (type == "integer") return v.is_number_integer();
    if (type == "boolean") return v.is_boolean();
    if (type == "array") return v.is_array();
    if (type == "object") return v.is_object();
    return false;
}

} // namespace

std::vector<std::string> ToolSpec::required() const {
    std::vector<std::string> out;
    for (const auto& [name, p] : params) {
        if (p.required) out.push_back(name);
    }
    return out;
}

json ToolSpec::to_json() const {
    json props = json::object();
    for (const auto& [pname, p] : params) props[pname] = {{"type", p.type}, {"description", p.description}};
    return {{"name", name},
            {"description", description},
            {"parameters", {{"type", "object"}, {"properties", props}, {"required", required()}}}};
}

void ToolSpec::check_args(const json& args) const {
    if (!args.is_object()) throw ArgumentError(name + ": arguments must be an object");
    for (const auto& [pname, p] : params) {
        if (!args.contains(pname)) {
            if (p.required) throw ArgumentError(name + ": missing required argument '" + pname + "'");
            continue;
        }
        if (!has_type(args.at(pname), p.type)) {
            throw ArgumentError(name + ": argument '" + pname + "' must be of type " + p.type);
        }
    }
    for (const auto& [key, value] : args.items()) {
        if (!params.count(key)) throw ArgumentError(name + ": unexpected argument '" + key + "'");
    }
}

ToolSpec tool_spec_from_json(const json& j) {
    ToolSpec s;
    s.name = j.at("name").get<std::string>();
    s.description = j.value("description", "");
    const auto& params = j.at("parameters");
    std::set<std::string> required;
    if (params.contains("required")) required = params.at("required").get<std::set<std::string>>();
    for (const auto& [pname, p] : params.at("properties").items()) {
        s.params[pname] = {p.value("type", ""), p.value("description", ""), required.count(pname) > 0};
    }
    return s;
}

std::string to_string(ToolStatus status) {
    switch (status) {
    case ToolStatus::ok: return "ok";
    case ToolStatus::error: return "error";
    case ToolStatus::refused: return "refused";
    }
    return "error";
}

ToolStatus tool_status_from_string(const std::string& s) {
    if (s == "ok") return ToolStatus::ok;
    if (s == "error") return ToolStatus::error;
    if (s == "refused") return ToolStatus::refused;
    throw ArgumentError("unknown tool status: " + s);
}

void ToolRegistry::add(std::shared_ptr<Tool> tool) {
    if (!tool) throw ArgumentError("null tool");
    const auto& spec = tool->spec();
    if (spec.name.empty()) throw IntegrityError("tool without a name");
    if (tools_.count(spec.name)) throw IntegrityError("duplicate tool name: " + spec.name);
    for (const auto& [pname, p] : spec.params) {
        if (!known_types().count(p.type)) {
            throw IntegrityError("tool " + spec.name + ": parameter '" + pname + "' has no valid type");
        }
    }
    tools_.emplace(spec.name, std::move(tool));
}

Tool* ToolRegistry::find(const std::string& name) const {
    auto it = tools_.find(name);
    return it == tools_.end() ? nullptr : it->second.get();
}

std::vector<std::string> ToolRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, t] : tools_) out.push_back(name);
    return out;
}

json ToolRegistry::specs_json() const {
    json out = json::array();
    for (const auto& [name, t] : tools_) out.push_back(t->spec().to_json());
    return out;
}

json to_json(const ToolCall& call) {
    return {{"call_id", call.call_id}, {"tool", call.tool}, {"args", call.args}, {"depends_on", call.depends_on}};
}

ToolCall tool_call_from_json(const json& j) {
    ToolCall c;
    c.call_id = j.at("call_id").get<std::string>();
    c.tool = j.at("tool").get<std::string>();
    c.args = j.value("args", json::object());
    c.depends_on = j.value("depends_on", std::vector<std::string>{});
    return c;
}

ExecutionPlan plan_from_json(const json& j) {
    ExecutionPlan plan;
    const json* calls = &j;
    if (j.is_object()) {
        calls = &j.at("calls");
        plan.max_calls = j.value("max_calls", ExecutionPlan::kDefaultMaxCalls);
    }
    if (!calls->is_array()) throw ArgumentError("plan must be a list of tool calls");
    for (const auto& c : *calls) plan.calls.push_back(tool_call_from_json(c));
    return plan;
}

json to_json(const ExecutionPlan& plan) {
    json calls = json::array();
    for (const auto& c : plan.calls) calls.push_back(to_json(c));
    return {{"calls", calls}, {"max_calls", plan.max_calls}};
}

json to_json(const ToolResult& r) {
    return {{"call_id", r.call_id}, {"tool", r.tool}, {"status", to_string(r.status)},
            {"output", r.output},   {"summary", r.summary}};
}

ToolResult tool_result_from_json(const json& j) {
    return {j.at("call_id").get<std::string>(), j.at("tool").get<std::string>(),
            tool_status_from_string(j.at("status").get<std::string>()), j.value("output", json()),
            j.value("summary", "")};
}

std::string summarize_results(const std::vector<ToolResult>& results) {
    std::string out;
    for (const auto& r : results) {
        if (!out.empty()) out += '\n';
        out += "[" + r.call_id + "] " + r.tool + " (" + to_string(r.status) + "): " + r.summary;
    }
    return out;
}

} // namespace oncoagent::tools
