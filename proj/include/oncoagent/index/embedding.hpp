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

#include "oncoagent/common/http.hpp"

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace oncoagent::index {

using Vector = std::vector<float>;

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::size_t dimension() const = 0;
    virtual std::string model() const = 0;
    /// One vector per input, same order. Implementations must be safe for
    /// concurrent use.
    virtual std::vector<Vector> embed_batch(const std::vector<std::string>& texts) = 0;
};

/// Deterministic offline embedder: each lowercased token seeds a
/// pseudo-random direction (hash-seeded), the directions are summed and the
/// sum normalized. Texts without tokens get a direction seeded by the text.
class MockEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit MockEmbeddingProvider(std::size_t dimension = 256);

    std::size_t dimension() const override { return dimension_; }
    std::string model() const override;
    std::vector<Vector> embed_batch(const std::vector<std::string>& texts) override;

    Vector embed_one(const std::string& text) const;

private:
    std::size_t dimension_;
};

struct RemoteEmbeddingSettings {
    std::string endpoint = "https://api.openai.com/v1/embeddings";
    std::string model = "text-embedding-3-large";
    std::string api_key_env = "OPENAI_API_KEY";
    std::size_t dimension = 3072;
    int retries = 3;
};

/// HTTP contract: POST {input: [..], model} -> {data: [{embedding: [..]}]}.
class RemoteEmbeddingProvider final : public EmbeddingProvider {
public:
    RemoteEmbeddingProvider(std::shared_ptr<http::Transport> transport, RemoteEmbeddingSettings settings = {});

    std::size_t dimension() const override { return settings_.dimension; }
    std::string model() const override { return settings_.model; }
    std::vector<Vector> embed_batch(const std::vector<std::string>& texts) override;

private:
    std::shared_ptr<http::Transport> transport_;
    RemoteEmbeddingSettings settings_;
};

/// Validating front door: rejects empty texts (ArgumentError) and raises
/// IntegrityError when the provider returns the wrong count or dimension.
std::vector<Vector> embed(const std::vector<std::string>& texts, EmbeddingProvider& provider);

} // namespace oncoagent::index
