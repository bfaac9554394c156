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

#include "oncoagent/index/tokenizer.hpp"

#include "oncoagent/common/text.hpp"

namespace oncoagent::index {

namespace {

bool is_punctuation(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) || (cp >= 0x5B && cp <= 0x60) ||
               (cp >= 0x7B && cp <= 0x7E);
    }
    // Latin-1 punctuation, general punctuation block, CJK symbols.
    return cp == 0xA1 || cp == 0xA7 || cp == 0xAB || cp == 0xB6 || cp == 0xB7 || cp == 0xBB ||
           cp == 0xBF || (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) ||
           (cp >= 0x3001 && cp <= 0x3003);
}

} // namespace

std::vector<TokenSpan> tokenize_spans(std::string_view s) {
    std::vector<TokenSpan> out;
    std::size_t i = 0;
    std::size_t word_start = std::string_view::npos;
    auto close_word = [&](std::size_t end) {
        if (word_start != std::string_view::npos) {
            out.push_back({word_start, end});
            word_start = std::string_view::npos;
        }
    };
    while (i < s.size()) {
        auto cp = text::decode_utf8(s, i);
        if (cp.valid && text::is_unicode_space(cp.value)) {
            close_word(i);
        } else if (cp.valid && is_punctuation(cp.value)) {
            close_word(i);
            out.push_back({i, i + cp.length});
        } else if (word_start == std::string_view::npos) {
            word_start = i;
        }
        i += cp.length;
    }
    close_word(s.size());
    return out;
}

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> out;
    for (const auto& span : tokenize_spans(s)) out.emplace_back(s.substr(span.begin, span.end - span.begin));
    return out;
}

} // namespace oncoagent::index
