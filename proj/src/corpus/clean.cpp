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

#include "oncoagent/corpus/clean.hpp"

#include "oncoagent/common/text.hpp"

#include <cctype>
#include <regex>

namespace oncoagent::corpus {

namespace {

bool is_format_char(char32_t cp) {
    return (cp >= 0x200B && cp <= 0x200D) || cp == 0x2060 || cp == 0xFEFF;
}

// Drops invalid UTF-8, C0/C1 controls (except newline), DEL and zero-width
// format characters. Tabs and other Unicode spaces become a plain space.
std::string strip_nonprintable(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        auto cp = text::decode_utf8(s, i);
        if (!cp.valid) {
            i += cp.length;
            continue;
        }
        const char32_t c = cp.value;
        if (c == '\n') {
            out += '\n';
        } else if (c != '\r' && text::is_unicode_space(c)) {
            out += ' ';
        } else if (c < 0x20 || c == 0x7F || (c >= 0x80 && c <= 0x9F) || is_format_char(c)) {
            // dropped
        } else {
            out.append(s.substr(i, cp.length));
        }
        i += cp.length;
    }
    return out;
}

bool is_trailing_punct(char c) {
    return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' || c == ')' ||
           c == ']' || c == '\'' || c == '"';
}

std::string remove_urls(const std::string& s) {
    static const std::regex url(R"((?:[A-Za-z][A-Za-z0-9+.\-]*://|www\.)[^\s<>"]*)",
                                std::regex::icase);
    std::string out;
    auto begin = s.cbegin();
    std::smatch m;
    while (std::regex_search(begin, s.cend(), m, url)) {
        out.append(begin, m[0].first);
        // Sentence punctuation directly after a URL belongs to the prose.
        auto end = m[0].second;
        auto keep = end;
        while (keep != m[0].first && is_trailing_punct(*(keep - 1))) --keep;
        out.append(keep, end);
        begin = end;
    }
    out.append(begin, s.cend());
    return out;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string remove_ipv4(const std::string& s) {
    std::string out;
    std::size_t i = 0;
    const std::size_t n = s.size();
    while (i < n) {
        bool boundary_before = i == 0 || (!is_digit(s[i - 1]) && s[i - 1] != '.');
        if (boundary_before && is_digit(s[i])) {
            std::size_t j = i;
            int groups = 0;
            bool ok = true;
            while (groups < 4) {
                std::size_t start = j;
                while (j < n && is_digit(s[j]) && j - start < 4) ++j;
                std::size_t len = j - start;
                if (len < 1 || len > 3) {
                    ok = false;
                    break;
                }
                ++groups;
                if (groups < 4) {
                    if (j < n && s[j] == '.') {
                        ++j;
                    } else {
                        ok = false;
                        break;
                    }
                }
            }
            bool boundary_after = j >= n || (!is_digit(s[j]) && !(s[j] == '.' && j + 1 < n && is_digit(s[j + 1])));
            if (ok && groups == 4 && boundary_after) {
                i = j;
                continue;
            }
        }
        out += s[i++];
    }
    return out;
}

std::string collapse_horizontal(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (c == ' ') {
            pending_space = true;
            continue;
        }
        if (c == '\n') {
            pending_space = false;
            out += '\n';
            continue;
        }
        if (pending_space && !out.empty() && out.back() != '\n') out += ' ';
        pending_space = false;
        out += c;
    }
    auto b = out.find_first_not_of(" \n");
    if (b == std::string::npos) return {};
    auto e = out.find_last_not_of(" \n");
    return out.substr(b, e - b + 1);
}

} // namespace

std::string clean_text(std::string_view raw) {
    std::string s = strip_nonprintable(raw);
    // Removing one pattern can expose another; iterate to a fixed point.
    while (true) {
        std::string next = remove_ipv4(remove_urls(s));
        if (next == s) break;
        s = std::move(next);
    }
    return collapse_horizontal(s);
}

} // namespace oncoagent::corpus
