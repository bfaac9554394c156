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

#include "oncoagent/index/chunk.hpp"
#include "oncoagent/index/embedding.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace oncoagent::index {

struct EmbeddingRecord {
    std::string chunk_id;
    Vector vector;
    float norm = 0;
};

struct SearchHit {
    std::string chunk_id;
    double score = 0;

    bool operator==(const SearchHit&) const = default;
};

using ChunkFilter = std::function<bool(const Chunk&)>;

double l2_norm(std::span<const float> v);

/// Exact cosine similarity, accumulated in double. Symmetric in its arguments.
double cosine_similarity(std::span<const float> a, std::span<const float> b);

/// Exact (brute-force) cosine store. Readers may search concurrently;
/// `add` takes an exclusive lock.
class VectorIndex {
public:
    static constexpr std::uint32_t kFormatVersion = 1;

    explicit VectorIndex(std::size_t dimension, std::string model = {});
    VectorIndex(VectorIndex&&) noexcept;
    VectorIndex& operator=(VectorIndex&&) noexcept;
    ~VectorIndex();

    std::size_t dimension() const { return dimension_; }
    const std::string& model() const { return model_; }
    std::size_t size() const;
    bool empty() const { return size() == 0; }

    /// Throws ArgumentError on dimension mismatch or a zero vector and
    /// IntegrityError on a duplicate chunk id.
    void add(Chunk chunk, Vector vector);

    /// Up to `top_n` hits by descending cosine, ties by ascending chunk id.
    /// The filter is applied before ranking.
    std::vector<SearchHit> search(std::span<const float> query, std::size_t top_n,
                                  const ChunkFilter& filter = {}) const;

    const Chunk* find_chunk(const std::string& chunk_id) const;
    /// Throws ArgumentError for unknown ids.
    const Chunk& chunk(const std::string& chunk_id) const;

    std::vector<EmbeddingRecord> records() const;
    std::vector<Chunk> chunks() const;

    void persist(const std::filesystem::path& path) const;
    /// Throws CorruptionError naming the cause (bad magic, version,
    /// truncation, checksum, malformed chunk table).
    static VectorIndex load(const std::filesystem::path& path);

private:
    std::size_t dimension_;
    std::string model_;
    std::unique_ptr<std::shared_mutex> mu_;
    std::vector<float> matrix_;
    std::vector<double> norms_;
    std::vector<Chunk> chunks_;
    std::unordered_map<std::string, std::size_t> position_;
};

} // namespace oncoagent::index
