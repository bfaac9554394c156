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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace oncoagent::index {

/// Byte range [begin, end) of one token in the source text.
struct TokenSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// Splits on Unicode whitespace; every punctuation character is its own token.
std::vector<TokenSpan> tokenize_spans(std::string_view text);

std::vector<std::string> tokenize(std::string_view text);

} // namespace oncoagent::index
