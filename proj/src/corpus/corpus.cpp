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

#include "oncoagent/corpus/corpus.hpp"

#include "oncoagent/common/error.hpp"
#include "oncoagent/common/fs.hpp"
#include "oncoagent/common/text.hpp"
#include "oncoagent/corpus/clean.hpp"
#include "oncoagent/corpus/tei.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>

namespace oncoagent::corpus {

using nlohmann::json;

namespace {

std::string one_line(std::string_view s) { return text::collapse_whitespace(clean_text(s)); }

bool is_heading_line(std::string_view line, int& level, std::string& heading) {
    if (line.empty() || line.front() != '#') return false;
    std::size_t n = line.find_first_not_of('#');
    if (n == std::string_view::npos) {
        level = static_cast<int>(line.size());
        heading.clear();
        return true;
    }
    if (line[n] != ' ') return false;
    level = static_cast<int>(n);
    heading = std::string(line.substr(n + 1));
    return true;
}

} // namespace

CuratedDocument normalize_structure(const SourceDocument& doc) {
    validate(doc);
    CuratedDocument out;
    out.id = doc.id;
    out.metadata.source = doc.source;
    out.metadata.title = text::collapse_whitespace(doc.title);
    for (const auto& a : doc.authors) {
        auto name = text::collapse_whitespace(a);
        if (!name.empty()) out.metadata.authors.push_back(std::move(name));
    }
    out.metadata.published = doc.published;
    out.metadata.url = doc.url;

    std::vector<std::string> blocks;
    for (const auto& section : doc.sections) {
        std::string heading = one_line(section.heading);
        std::string line(static_cast<std::size_t>(section.level), '#');
        if (!heading.empty()) line += " " + heading;
        blocks.push_back(std::move(line));
        for (const auto& p : section.paragraphs) {
            std::string para = one_line(p);
            if (para.empty()) continue;
            if (para.front() == '#' || para.front() == '\\') para.insert(para.begin(), '\\');
            blocks.push_back(std::move(para));
        }
    }
    out.text = text::join(blocks, "\n\n");
    return out;
}

std::vector<Section> parse_sections(std::string_view text) {
    std::vector<Section> sections;
    for (const auto& line : text::split_lines(text)) {
        if (line.empty()) continue;
        int level = 0;
        std::string heading;
        if (is_heading_line(line, level, heading)) {
            sections.push_back(Section{level, heading, {}});
            continue;
        }
        std::string para = line;
        if (para.front() == '\\') para.erase(para.begin());
        if (sections.empty()) sections.push_back(Section{1, "", {}});
        sections.back().paragraphs.push_back(std::move(para));
    }
    return sections;
}

std::vector<Section> parse_markdown(std::string_view text) {
    std::vector<Section> sections;
    std::string pending;
    auto flush = [&] {
        auto p = text::collapse_whitespace(pending);
        pending.clear();
        if (p.empty()) return;
        if (sections.empty()) sections.push_back(Section{1, "", {}});
        sections.back().paragraphs.push_back(std::move(p));
    };
    for (const auto& raw : text::split_lines(text)) {
        std::string line = text::trim(raw);
        int level = 0;
        std::string heading;
        if (is_heading_line(line, level, heading)) {
            flush();
            sections.push_back(Section{level, text::collapse_whitespace(heading), {}});
        } else if (line.empty()) {
            flush();
        } else {
            if (!pending.empty()) pending += ' ';
            pending += line;
        }
    }
    flush();
    return sections;
}

std::vector<CuratedDocument> keyword_filter(const std::vector<CuratedDocument>& docs,
                                            const std::vector<std::string>& keywords) {
    std::vector<std::string> needles;
    for (const auto& k : keywords) {
        auto t = text::trim(k);
        if (!t.empty()) needles.push_back(text::to_lower(t));
    }
    if (needles.empty()) throw ArgumentError("keyword_filter needs at least one keyword");

    std::vector<CuratedDocument> out;
    for (const auto& doc : docs) {
        const auto body = text::to_lower(doc.text);
        const auto title = text::to_lower(doc.metadata.title);
        bool hit = std::any_of(needles.begin(), needles.end(), [&](const std::string& k) {
            return body.find(k) != std::string::npos || title.find(k) != std::string::npos;
        });
        if (hit) out.push_back(doc);
    }
    return out;
}

std::size_t archive_jsonl(const std::vector<CuratedDocument>& docs, const std::filesystem::path& path) {
    std::string out;
    for (const auto& doc : docs) {
        out += to_json(doc).dump();
        out += '\n';
    }
    fs::write_file_atomic(path, out);
    return docs.size();
}

namespace {

template <typename F>
void for_each_json_line(const std::filesystem::path& path, F&& fn) {
    const std::string content = fs::read_file(path);
    std::size_t line_no = 0;
    for (const auto& line : text::split_lines(content)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(path.filename().string() + " line " + std::to_string(line_no) +
                                 ": invalid JSON (" + e.what() + ")",
                             line_no, ParseError::Unit::line);
        }
        try {
            fn(j, line_no);
        } catch (const json::exception& e) {
            throw ParseError(path.filename().string() + " line " + std::to_string(line_no) +
                                 ": unexpected record shape (" + e.what() + ")",
                             line_no, ParseError::Unit::line);
        } catch (const ArgumentError& e) {
            throw ParseError(path.filename().string() + " line " + std::to_string(line_no) + ": " + e.what(),
                             line_no, ParseError::Unit::line);
        }
    }
}

CuratedDocument from_meditron(const json& j, Source source) {
    SourceDocument doc;
    doc.id = j.at("id").get<std::string>();
    doc.source = source;
    doc.title = j.value("title", "");
    if (j.contains("url") && j.at("url").is_string()) doc.url = j.at("url").get<std::string>();
    std::string body;
    if (j.contains("clean_text")) {
        body = j.at("clean_text").get<std::string>();
    } else {
        body = j.at("text").get<std::string>();
    }
    doc.sections = parse_markdown(body);
    return normalize_structure(doc);
}

bool has_extension(const std::filesystem::path& p, std::initializer_list<std::string_view> exts) {
    auto ext = text::to_lower(p.extension().string());
    return std::any_of(exts.begin(), exts.end(), [&](std::string_view e) { return ext == e; });
}

} // namespace

std::vector<CuratedDocument> load_jsonl(const std::filesystem::path& path) {
    std::vector<CuratedDocument> docs;
    for_each_json_line(path, [&](const json& j, std::size_t) { docs.push_back(curated_from_json(j)); });
    return docs;
}

InputFormat input_format_from_string(std::string_view name) {
    if (name == "tei") return InputFormat::tei;
    if (name == "jsonl") return InputFormat::jsonl;
    if (name == "text") return InputFormat::text;
    throw ArgumentError("unknown input format '" + std::string(name) + "' (expected tei|jsonl|text)");
}

std::vector<CuratedDocument> ingest_directory(const std::filesystem::path& dir, const IngestOptions& options) {
    if (!std::filesystem::is_directory(dir)) throw IoError("input directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<CuratedDocument> docs;
    for (const auto& file : files) {
        switch (options.format) {
        case InputFormat::tei:
            if (has_extension(file, {".xml", ".tei"})) {
                docs.push_back(normalize_structure(parse_tei(fs::read_file(file), file.stem().string(), options.source)));
            }
            break;
        case InputFormat::text:
            if (has_extension(file, {".txt", ".md"})) {
                SourceDocument doc;
                doc.id = file.stem().string();
                doc.source = options.source;
                doc.title = file.stem().string();
                doc.sections = parse_markdown(fs::read_file(file));
                docs.push_back(normalize_structure(doc));
            }
            break;
        case InputFormat::jsonl:
            if (has_extension(file, {".jsonl"})) {
                for_each_json_line(file, [&](const json& j, std::size_t) {
                    if (j.contains("metadata")) {
                        docs.push_back(curated_from_json(j));
                    } else {
                        Source src = options.source == Source::custom ? Source::meditron : options.source;
                        docs.push_back(from_meditron(j, src));
                    }
                });
            }
            break;
        }
    }

    std::set<std::string> seen;
    for (const auto& d : docs) {
        if (!seen.insert(d.id).second) throw IntegrityError("duplicate document id '" + d.id + "'");
    }
    return docs;
}

std::vector<std::string> load_keywords(const std::filesystem::path& path) {
    std::vector<std::string> out;
    for (const auto& line : text::split_lines(fs::read_file(path))) {
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        out.push_back(t);
    }
    return out;
}

} // namespace oncoagent::corpus
