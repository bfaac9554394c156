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

#include <map>
#include <string>
#include <vector>

namespace oncoagent::index {

inline const std::vector<int> kDefaultWindows{512, 256, 128};
inline constexpr int kDefaultOverlap = 50;

using Metadata = std::map<std::string, std::string>;

struct Chunk {
    std::string doc_id;
    std::string chunk_id; // "<doc_id>:<window>:<token_start>"
    int window = 0;
    int token_start = 0;
    int token_len = 0;
    std::string text;
    Metadata metadata;

    bool operator==(const Chunk&) const = default;
};

std::string make_chunk_id(const std::string& doc_id, int window, int token_start);

/// Half-open token range of one chunk.
struct ChunkSpan {
    int start = 0;
    int length = 0;
    bool operator==(const ChunkSpan&) const = default;
};

/// Window placement over `token_count` tokens: starts at 0, w-o, 2(w-o), ...
/// with a trailing partial chunk whenever tokens remain uncovered.
/// Throws ArgumentError unless 0 <= overlap < window.
std::vector<ChunkSpan> chunk_spans(int token_count, int window, int overlap);

/// Chunks of `doc` for every window size. Chunk text is the original
/// substring spanning its tokens. Metadata carries the document metadata
/// plus `doc_id` and `window`. Throws ArgumentError on an empty document
/// or when overlap >= min(windows).
std::vector<Chunk> chunk_document(const corpus::CuratedDocument& doc,
                                  const std::vector<int>& windows = kDefaultWindows,
                                  int overlap = kDefaultOverlap);

Metadata document_metadata(const corpus::CuratedDocument& doc);

} // namespace oncoagent::index
