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

#include <string_view>

namespace oncoagent::toml {

/// Reads the TOML subset used by engine config files into a JSON tree:
/// `[table]` / `[a.b]` headers, `key = value` with dotted keys, basic and
/// literal strings, integers, floats, booleans and (possibly multi-line)
/// arrays. Inline tables, dates and multi-line strings are rejected.
/// Errors are ParseError with a 1-based line number.
nlohmann::json parse(std::string_view text);

} // namespace oncoagent::toml
