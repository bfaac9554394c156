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

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace oncoagent::xml {

struct Element;
using Node = std::variant<std::unique_ptr<Element>, std::string>;

/// Minimal DOM. Names are local (namespace prefix stripped).
struct Element {
    std::string name;
    std::map<std::string, std::string> attrs;
    std::vector<Node> children;

    const Element* child(std::string_view n) const;
    std::vector<const Element*> children_named(std::string_view n) const;
    /// Depth-first search for the first descendant with this name.
    const Element* find(std::string_view n) const;
    std::string attr(const std::string& key) const;
    /// Concatenated character data of all descendants.
    std::string text() const;
};

/// Throws ParseError carrying the byte offset of malformed input.
std::unique_ptr<Element> parse(std::string_view xml);

} // namespace oncoagent::xml
