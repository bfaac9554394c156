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

#include "oncoagent/tools/tool.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace oncoagent::tools {

struct ExecutorOptions {
    std::size_t workers = 4;
};

/// Call ids referenced by "$id" / "$id.field" strings anywhere in `args`.
/// "$$..." is an escaped literal and references nothing.
std::set<std::string> referenced_calls(const nlohmann::json& args);

/// Replaces every reference with the producing call's output (or the named
/// field of it; numeric path segments index arrays) and unescapes "$$".
/// Throws ResolutionError when a call or field is missing.
nlohmann::json substitute_args(const nlohmann::json& args, const std::map<std::string, nlohmann::json>& outputs);

/// Throws PlanError before anything runs: more than max_calls calls,
/// malformed or duplicate call ids, unknown tools (all listed), unknown
/// dependencies, or a dependency cycle (members listed).
void validate_plan(const ExecutionPlan& plan, const ToolRegistry& registry);

/// Runs the plan on a bounded worker pool. A call starts only after every
/// dependency (explicit or referenced) finished ok; otherwise it fails
/// without running. Tool errors stay local to their call. After a refusal no
/// further calls start. Results come back in call order.
std::vector<ToolResult> execute_plan(const ExecutionPlan& plan, const ToolRegistry& registry,
                                     const ExecutorOptions& options = {});

} // namespace oncoagent::tools
