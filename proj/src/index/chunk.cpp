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

#include "oncoagent/index/chunk.hpp"

#include "oncoagent/common/error.hpp"
#include "oncoagent/common/text.hpp"
#include "oncoagent/index/tokenizer.hpp"

namespace oncoagent::index {

std::string make_chunk_id(const std::string& doc_id, int window, int token_start) {
    return doc_id + ":" + std::to_string(window) + ":" + std::to_string(token_start);
}

std::vector<ChunkSpan> chunk_spans(int token_count, int window, int overlap) {
    if (window < 1) throw ArgumentError("window must be >= 1");
    if (overlap < 0 || overlap >= window) {
        throw ArgumentError("overlap " + std::to_string(overlap) + " must be in [0, window=" +
                            std::to_string(window) + ")");
    }
    std::vector<ChunkSpan> spans;
    if (token_count <= 0) return spans;
    const int stride = window - overlap;
    int start = 0;
    while (true) {
        int len = std::min(window, token_count - start);
        spans.push_back({start, len});
        if (start + len >= token_count) break;
        start += stride;
    }
    return spans;
}

Metadata document_metadata(const corpus::CuratedDocument& doc) {
    Metadata m;
    m["doc_id"] = doc.id;
    m["source"] = std::string(corpus::to_string(doc.metadata.source));
    m["title"] = doc.metadata.title;
    if (!doc.metadata.authors.empty()) m["authors"] = text::join(doc.metadata.authors, "; ");
    if (doc.metadata.published) m["published"] = *doc.metadata.published;
    if (doc.metadata.url) m["url"] = *doc.metadata.url;
    return m;
}

std::vector<Chunk> chunk_document(const corpus::CuratedDocument& doc, const std::vector<int>& windows,
                                  int overlap) {
    if (windows.empty()) throw ArgumentError("at least one window size is required");
    for (int w : windows) {
        if (overlap >= w) {
            throw ArgumentError("overlap " + std::to_string(overlap) + " must be smaller than window " +
                                std::to_string(w));
        }
    }
    const auto tokens = tokenize_spans(doc.text);
    if (tokens.empty()) throw ArgumentError("document " + doc.id + " has no tokens");

    const Metadata base = document_metadata(doc);
    std::vector<Chunk> chunks;
    for (int w : windows) {
        for (const auto& span : chunk_spans(static_cast<int>(tokens.size()), w, overlap)) {
            Chunk c;
            c.doc_id = doc.id;
            c.window = w;
            c.token_start = span.start;
            c.token_len = span.length;
            c.chunk_id = make_chunk_id(doc.id, w, span.start);
            const auto begin = tokens[static_cast<std::size_t>(span.start)].begin;
            const auto end = tokens[static_cast<std::size_t>(span.start + span.length - 1)].end;
            c.text = doc.text.substr(begin, end - begin);
            c.metadata = base;
            c.metadata["window"] = std::to_string(w);
            chunks.push_back(std::move(c));
        }
    }
    return chunks;
}

} // namespace oncoagent::index
