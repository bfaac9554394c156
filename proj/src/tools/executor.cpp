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

#include "oncoagent/tools/executor.hpp"

#include "oncoagent/common/error.hpp"
#include "oncoagent/common/text.hpp"
#include "oncoagent/llm/provider.hpp"

#include <algorithm>
#include <cctype>
#include <condition_variable>
#include <mutex>
#include <optional>
#include <thread>

namespace oncoagent::tools {

using nlohmann::json;

namespace {

struct Reference {
    std::string call_id;
    std::vector<std::string> path;
};

std::optional<Reference> parse_reference(const std::string& s) {
    if (s.size() < 2 || s[0] != '$' || s[1] == '$') return std::nullopt;
    Reference ref;
    auto parts = std::string_view(s).substr(1);
    std::size_t start = 0;
    while (true) {
        auto dot = parts.find('.', start);
        auto piece = std::string(parts.substr(start, dot == std::string_view::npos ? dot : dot - start));
        if (ref.call_id.empty() && start == 0) {
            ref.call_id = piece;
        } else {
            ref.path.push_back(piece);
        }
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return ref;
}

void collect_references(const json& v, std::set<std::string>& out) {
    if (v.is_string()) {
        if (auto ref = parse_reference(v.get<std::string>())) out.insert(ref->call_id);
    } else if (v.is_structured()) {
        for (const auto& item : v) collect_references(item, out);
    }
}

bool valid_call_id(const std::string& id) {
    if (id.empty()) return false;
    return std::none_of(id.begin(), id.end(), [](char c) {
        return c == '.' || c == '$' || std::isspace(static_cast<unsigned char>(c));
    });
}

} // namespace

std::set<std::string> referenced_calls(const json& args) {
    std::set<std::string> out;
    collect_references(args, out);
    return out;
}

json substitute_args(const json& args, const std::map<std::string, json>& outputs) {
    if (args.is_string()) {
        const auto& s = args.get_ref<const std::string&>();
        if (s.size() >= 2 && s[0] == '$' && s[1] == '$') return s.substr(1);
        auto ref = parse_reference(s);
        if (!ref) return args;
        auto it = outputs.find(ref->call_id);
        if (it == outputs.end()) throw ResolutionError("unresolved reference " + s + ": no output from call " + ref->call_id);
        const json* cur = &it->second;
        for (const auto& seg : ref->path) {
            if (cur->is_object() && cur->contains(seg)) {
                cur = &cur->at(seg);
            } else if (cur->is_array() && !seg.empty() && std::all_of(seg.begin(), seg.end(), [](unsigned char c) { return std::isdigit(c) != 0; }) &&
                       std::stoul(seg) < cur->size()) {
                cur = &cur->at(std::stoul(seg));
            } else {
                throw ResolutionError("unresolved reference " + s + ": field '" + seg + "' not found");
            }
        }
        return *cur;
    }
    if (args.is_object()) {
        json out = json::object();
        for (const auto& [k, v] : args.items()) out[k] = substitute_args(v, outputs);
        return out;
    }
    if (args.is_array()) {
        json out = json::array();
        for (const auto& v : args) out.push_back(substitute_args(v, outputs));
        return out;
    }
    return args;
}

namespace {

std::vector<std::vector<std::size_t>> dependency_lists(const ExecutionPlan& plan) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < plan.calls.size(); ++i) index[plan.calls[i].call_id] = i;
    std::vector<std::vector<std::size_t>> deps(plan.calls.size());
    for (std::size_t i = 0; i < plan.calls.size(); ++i) {
        std::set<std::string> ids(plan.calls[i].depends_on.begin(), plan.calls[i].depends_on.end());
        auto refs = referenced_calls(plan.calls[i].args);
        ids.insert(refs.begin(), refs.end());
        for (const auto& id : ids) deps[i].push_back(index.at(id));
        std::sort(deps[i].begin(), deps[i].end());
    }
    return deps;
}

} // namespace

void validate_plan(const ExecutionPlan& plan, const ToolRegistry& registry) {
    if (plan.max_calls < 1) throw PlanError("max_calls must be >= 1");
    if (static_cast<int>(plan.calls.size()) > plan.max_calls) {
        throw PlanError("plan has " + std::to_string(plan.calls.size()) + " calls; the limit is " +
                        std::to_string(plan.max_calls) + " per invocation");
    }
    std::set<std::string> ids;
    std::vector<std::string> unknown_tools;
    for (const auto& c : plan.calls) {
        if (!valid_call_id(c.call_id)) throw PlanError("invalid call id '" + c.call_id + "'");
        if (!ids.insert(c.call_id).second) throw PlanError("duplicate call id " + c.call_id);
        if (!registry.find(c.tool) &&
            std::find(unknown_tools.begin(), unknown_tools.end(), c.tool) == unknown_tools.end()) {
            unknown_tools.push_back(c.tool);
        }
    }
    if (!unknown_tools.empty()) {
        throw PlanError("plan names unregistered tools: " + text::join(unknown_tools, ", "));
    }
    for (const auto& c : plan.calls) {
        auto refs = referenced_calls(c.args);
        refs.insert(c.depends_on.begin(), c.depends_on.end());
        for (const auto& r : refs) {
            if (!ids.count(r)) throw PlanError("call " + c.call_id + " depends on unknown call " + r);
        }
    }
    auto deps = dependency_lists(plan);
    std::vector<std::size_t> indegree(plan.calls.size());
    std::vector<std::vector<std::size_t>> dependents(plan.calls.size());
    for (std::size_t i = 0; i < deps.size(); ++i) {
        indegree[i] = deps[i].size();
        for (auto d : deps[i]) dependents[d].push_back(i);
    }
    std::vector<std::size_t> queue;
    for (std::size_t i = 0; i < indegree.size(); ++i) {
        if (indegree[i] == 0) queue.push_back(i);
    }
    std::size_t visited = 0;
    while (!queue.empty()) {
        auto i = queue.back();
        queue.pop_back();
        ++visited;
        for (auto d : dependents[i]) {
            if (--indegree[d] == 0) queue.push_back(d);
        }
    }
    if (visited != plan.calls.size()) {
        std::vector<std::string> members;
        for (std::size_t i = 0; i < indegree.size(); ++i) {
            if (indegree[i] > 0) members.push_back(plan.calls[i].call_id);
        }
        throw PlanError("dependency cycle among calls: " + text::join(members, ", "));
    }
}

namespace {

ToolResult failed(const ToolCall& call, ToolStatus status, const std::string& message) {
    return {call.call_id, call.tool, status, json{{"error", message}}, message};
}

ToolResult run_call(const ToolCall& call, Tool& tool, const std::map<std::string, json>& outputs) {
    llm::ScopedCallContext scope("tool:" + call.call_id);
    try {
        auto args = substitute_args(call.args, outputs);
        tool.spec().check_args(args);
        auto out = tool.invoke(args);
        if (out.summary.empty()) out.summary = call.tool + " completed";
        return {call.call_id, call.tool, ToolStatus::ok, std::move(out.output), std::move(out.summary)};
    } catch (const RefusalError& e) {
        return failed(call, ToolStatus::refused, e.what());
    } catch (const std::exception& e) {
        return failed(call, ToolStatus::error, e.what());
    }
}

} // namespace

std::vector<ToolResult> execute_plan(const ExecutionPlan& plan, const ToolRegistry& registry,
                                     const ExecutorOptions& options) {
    validate_plan(plan, registry);
    const std::size_t n = plan.calls.size();
    if (n == 0) return {};
    const auto deps = dependency_lists(plan);

    enum class State { pending, running, done };
    std::vector<State> state(n, State::pending);
    std::vector<ToolResult> results(n);
    std::optional<std::string> refused_by;
    std::size_t finished = 0;
    std::mutex mu;
    std::condition_variable cv;

    // Settles every pending call that can be decided without running it and
    // returns the lowest-index call that is ready to run, if any.
    auto next_ready = [&]() -> std::optional<std::size_t> {
        bool progressed = true;
        while (progressed) {
            progressed = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (state[i] != State::pending) continue;
                const auto& call = plan.calls[i];
                if (refused_by) {
                    results[i] = failed(call, ToolStatus::error, "not run: plan aborted after refusal in call " + *refused_by);
                } else {
                    bool waiting = false;
                    std::optional<std::string> broken;
                    for (auto d : deps[i]) {
                        if (state[d] != State::done) {
                            waiting = true;
                        } else if (results[d].status != ToolStatus::ok && !broken) {
                            broken = plan.calls[d].call_id;
                        }
                    }
                    if (broken) {
                        results[i] = failed(call, ToolStatus::error, "not run: dependency " + *broken + " did not succeed");
                    } else if (waiting) {
                        continue;
                    } else {
                        return i;
                    }
                }
                state[i] = State::done;
                ++finished;
                progressed = true;
            }
        }
        return std::nullopt;
    };

    auto worker = [&] {
        std::unique_lock lock(mu);
        while (true) {
            std::optional<std::size_t> pick;
            cv.wait(lock, [&] {
                pick = next_ready();
                return pick.has_value() || finished == n;
            });
            if (!pick) {
                cv.notify_all();
                return;
            }
            const auto i = *pick;
            state[i] = State::running;
            std::map<std::string, json> outputs;
            for (auto d : deps[i]) outputs[plan.calls[d].call_id] = results[d].output;
            lock.unlock();
            auto result = run_call(plan.calls[i], *registry.find(plan.calls[i].tool), outputs);
            lock.lock();
            if (result.status == ToolStatus::refused && !refused_by) refused_by = result.call_id;
            results[i] = std::move(result);
            state[i] = State::done;
            ++finished;
            cv.notify_all();
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, n);
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    return results;
}

} // namespace oncoagent::tools
