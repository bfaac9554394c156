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

#include "oncoagent/corpus/document.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace oncoagent::corpus {

/// Flattens a document into '#'-headed text. Headings and paragraphs are
/// cleaned with clean_text and kept on one line each; paragraphs that
/// clean to nothing are dropped. A paragraph that would start with '#' or
/// '\' is escaped with a leading '\' so headings stay unambiguous.
CuratedDocument normalize_structure(const SourceDocument& doc);

/// Inverse of the text layout produced by normalize_structure.
std::vector<Section> parse_sections(std::string_view text);

/// Loose markdown reader for plain-text sources: '#' lines are headings,
/// blank lines separate paragraphs and wrapped lines are joined. Text
/// before the first heading lands in a level-1 section with an empty heading.
std::vector<Section> parse_markdown(std::string_view text);

/// Documents whose text or title contains at least one keyword
/// (case-insensitive substring), in input order. Throws ArgumentError when
/// no non-blank keyword is given.
std::vector<CuratedDocument> keyword_filter(const std::vector<CuratedDocument>& docs,
                                            const std::vector<std::string>& keywords);

/// Writes one JSON object per line; returns the number of documents.
std::size_t archive_jsonl(const std::vector<CuratedDocument>& docs, const std::filesystem::path& path);

/// Throws ParseError naming the 1-based line of the first malformed record.
std::vector<CuratedDocument> load_jsonl(const std::filesystem::path& path);

enum class InputFormat { tei, jsonl, text };

InputFormat input_format_from_string(std::string_view name);

struct IngestOptions {
    InputFormat format = InputFormat::tei;
    Source source = Source::custom;
};

/// Ingests every matching file in `dir` (sorted by name): `.xml`/`.tei`
/// for TEI, `.txt`/`.md` for text, `.jsonl` for jsonlines. Jsonlines
/// records are either archived CuratedDocuments or MEDITRON-style objects
/// (`id`, `title`, `clean_text`|`text`, optional `url`). Throws
/// IntegrityError on duplicate ids.
std::vector<CuratedDocument> ingest_directory(const std::filesystem::path& dir, const IngestOptions& options);

/// Reads one keyword per line, skipping blanks and '#' comments.
std::vector<std::string> load_keywords(const std::filesystem::path& path);

} // namespace oncoagent::corpus
