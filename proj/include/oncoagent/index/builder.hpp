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
#include "oncoagent/index/chunk.hpp"
#include "oncoagent/index/embedding.hpp"
#include "oncoagent/index/vector_index.hpp"

#include <vector>

namespace oncoagent::index {

struct BuildOptions {
    std::vector<int> windows = kDefaultWindows;
    int overlap = kDefaultOverlap;
    std::size_t batch_size = 64;
    std::size_t workers = 4;
};

/// Chunks every document (all windows in one collection), embeds the
/// chunks in parallel batches and adds them in deterministic order.
/// Documents without tokens are skipped.
VectorIndex build_index(const std::vector<corpus::CuratedDocument>& docs, EmbeddingProvider& provider,
                        const BuildOptions& options = {});

/// Adds pre-made chunks to `index`, embedding them in parallel batches.
void add_chunks(VectorIndex& index, std::vector<Chunk> chunks, EmbeddingProvider& provider,
                const BuildOptions& options = {});

} // namespace oncoagent::index
