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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oncoagent::corpus {

enum class Source { mdcalc, uptodate, meditron, asco, esmo, onkopedia, custom };

std::string_view to_string(Source source);
/// Throws ArgumentError on unknown names.
Source source_from_string(std::string_view name);

struct Section {
    int level = 1;
    std::string heading;
    std::vector<std::string> paragraphs;

    bool operator==(const Section&) const = default;
};

/// Parsed source before cleaning and flattening.
struct SourceDocument {
    std::string id;
    Source source = Source::custom;
    std::string title;
    std::vector<std::string> authors;
    std::optional<std::string> published; // ISO-8601 date
    std::optional<std::string> url;
    std::vector<Section> sections;
};

/// Throws ArgumentError if the id is empty, a heading level is < 1 or a
/// paragraph carries leading/trailing whitespace.
void validate(const SourceDocument& doc);

struct Metadata {
    Source source = Source::custom;
    std::string title;
    std::vector<std::string> authors;
    std::optional<std::string> published;
    std::optional<std::string> url;

    bool operator==(const Metadata&) const = default;
};

/// Cleaned document; `text` is '#'-headed markdown with blank-line separated blocks.
struct CuratedDocument {
    std::string id;
    Metadata metadata;
    std::string text;

    bool operator==(const CuratedDocument&) const = default;
};

nlohmann::json to_json(const CuratedDocument& doc);
/// Throws nlohmann::json::exception or ArgumentError on schema violations.
CuratedDocument curated_from_json(const nlohmann::json& j);

bool is_iso_date(std::string_view s);

} // namespace oncoagent::corpus
