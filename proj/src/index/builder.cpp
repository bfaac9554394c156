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

#include "oncoagent/index/builder.hpp"

#include "oncoagent/common/error.hpp"
#include "oncoagent/index/tokenizer.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <future>

namespace oncoagent::index {

void add_chunks(VectorIndex& index, std::vector<Chunk> chunks, EmbeddingProvider& provider,
                const BuildOptions& options) {
    if (provider.dimension() != index.dimension()) {
        throw IntegrityError("provider dimension " + std::to_string(provider.dimension()) +
                             " != index dimension " + std::to_string(index.dimension()));
    }
    const std::size_t batch = std::max<std::size_t>(1, options.batch_size);
    const std::size_t workers = std::max<std::size_t>(1, options.workers);

    std::vector<std::vector<std::string>> batches;
    for (std::size_t i = 0; i < chunks.size(); i += batch) {
        std::vector<std::string> texts;
        for (std::size_t j = i; j < std::min(chunks.size(), i + batch); ++j) texts.push_back(chunks[j].text);
        batches.push_back(std::move(texts));
    }

    std::vector<std::vector<Vector>> results(batches.size());
    for (std::size_t wave = 0; wave < batches.size(); wave += workers) {
        std::vector<std::future<std::vector<Vector>>> inflight;
        const std::size_t end = std::min(batches.size(), wave + workers);
        for (std::size_t b = wave; b < end; ++b) {
            inflight.push_back(std::async(std::launch::async, [&, b] { return embed(batches[b], provider); }));
        }
        for (std::size_t b = wave; b < end; ++b) results[b] = inflight[b - wave].get();
    }

    std::size_t k = 0;
    for (auto& vectors : results) {
        for (auto& v : vectors) index.add(std::move(chunks[k++]), std::move(v));
    }
}

VectorIndex build_index(const std::vector<corpus::CuratedDocument>& docs, EmbeddingProvider& provider,
                        const BuildOptions& options) {
    std::vector<Chunk> chunks;
    for (const auto& doc : docs) {
        if (tokenize_spans(doc.text).empty()) {
            spdlog::warn("skipping document {} with no tokens", doc.id);
            continue;
        }
        auto c = chunk_document(doc, options.windows, options.overlap);
        std::move(c.begin(), c.end(), std::back_inserter(chunks));
    }
    VectorIndex index(provider.dimension(), provider.model());
    add_chunks(index, std::move(chunks), provider, options);
    return index;
}

} // namespace oncoagent::index
