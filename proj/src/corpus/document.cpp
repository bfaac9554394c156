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

#include "oncoagent/corpus/document.hpp"

#include "oncoagent/common/error.hpp"

#include <array>
#include <cctype>
#include <regex>
#include <set>

namespace oncoagent::corpus {

using nlohmann::json;

namespace {
constexpr std::array<std::pair<Source, std::string_view>, 7> kSourceNames{{
    {Source::mdcalc, "mdcalc"},
    {Source::uptodate, "uptodate"},
    {Source::meditron, "meditron"},
    {Source::asco, "asco"},
    {Source::esmo, "esmo"},
    {Source::onkopedia, "onkopedia"},
    {Source::custom, "custom"},
}};

bool has_outer_space(const std::string& s) {
    return !s.empty() && (std::isspace(static_cast<unsigned char>(s.front())) ||
                          std::isspace(static_cast<unsigned char>(s.back())));
}

json optional_to_json(const std::optional<std::string>& v) {
    return v ? json(*v) : json(nullptr);
}

std::optional<std::string> optional_from_json(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::string>();
}
} // namespace

std::string_view to_string(Source source) {
    for (const auto& [s, name] : kSourceNames) {
        if (s == source) return name;
    }
    return "custom";
}

Source source_from_string(std::string_view name) {
    for (const auto& [s, n] : kSourceNames) {
        if (n == name) return s;
    }
    throw ArgumentError("unknown document source '" + std::string(name) + "'");
}

void validate(const SourceDocument& doc) {
    if (doc.id.empty()) throw ArgumentError("document id must not be empty");
    for (const auto& section : doc.sections) {
        if (section.level < 1) {
            throw ArgumentError("document " + doc.id + ": heading level must be >= 1");
        }
        for (const auto& p : section.paragraphs) {
            if (has_outer_space(p)) {
                throw ArgumentError("document " + doc.id + ": paragraph has surrounding whitespace");
            }
        }
    }
}

bool is_iso_date(std::string_view s) {
    static const std::regex re(R"(^\d{4}(-\d{2}(-\d{2})?)?$)");
    return std::regex_match(s.begin(), s.end(), re);
}

json to_json(const CuratedDocument& doc) {
    return json{{"id", doc.id},
                {"metadata",
                 {{"source", std::string(to_string(doc.metadata.source))},
                  {"title", doc.metadata.title},
                  {"authors", doc.metadata.authors},
                  {"published", optional_to_json(doc.metadata.published)},
                  {"url", optional_to_json(doc.metadata.url)}}},
                {"text", doc.text}};
}

CuratedDocument curated_from_json(const json& j) {
    CuratedDocument doc;
    doc.id = j.at("id").get<std::string>();
    if (doc.id.empty()) throw ArgumentError("document id must not be empty");
    const auto& m = j.at("metadata");
    doc.metadata.source = source_from_string(m.at("source").get<std::string>());
    doc.metadata.title = m.value("title", "");
    doc.metadata.authors = m.value("authors", std::vector<std::string>{});
    doc.metadata.published = optional_from_json(m, "published");
    doc.metadata.url = optional_from_json(m, "url");
    doc.text = j.at("text").get<std::string>();
    return doc;
}

} // namespace oncoagent::corpus
