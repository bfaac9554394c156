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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace oncoagent::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
bool contains_ci(std::string_view haystack, std::string_view needle);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::vector<std::string> split_lines(std::string_view s);

/// Collapses every run of whitespace (including newlines) into one space and trims.
std::string collapse_whitespace(std::string_view s);

/// Lowercased, whitespace-collapsed form used as a deduplication key.
std::string normalize_for_dedup(std::string_view s);

/// Fixed-point rendering, e.g. format_fixed(3.8904, 2) == "3.89".
std::string format_fixed(double value, int decimals);

struct CodePoint {
    char32_t value = 0;
    std::size_t length = 1;
    bool valid = false;
};

/// Decodes one UTF-8 sequence at `pos`. Invalid sequences report length 1.
CodePoint decode_utf8(std::string_view s, std::size_t pos);

bool is_unicode_space(char32_t cp);

std::uint64_t fnv1a64(std::string_view s);

} // namespace oncoagent::text
