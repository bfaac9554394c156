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

#include "oncoagent/index/embedding.hpp"

#include "oncoagent/common/error.hpp"
#include "oncoagent/common/text.hpp"
#include "oncoagent/index/tokenizer.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <random>

namespace oncoagent::index {

using nlohmann::json;

namespace {

void add_direction(std::uint64_t seed, std::vector<double>& acc) {
    std::mt19937_64 gen(seed);
    for (auto& v : acc) {
        // Top 53 bits -> [0, 1) -> [-1, 1).
        double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        v += 2.0 * u - 1.0;
    }
}

Vector normalized(const std::vector<double>& acc) {
    double sq = 0;
    for (double v : acc) sq += v * v;
    const double n = std::sqrt(sq);
    Vector out(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) out[i] = static_cast<float>(acc[i] / n);
    return out;
}

} // namespace

MockEmbeddingProvider::MockEmbeddingProvider(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ == 0) throw ArgumentError("embedding dimension must be positive");
}

std::string MockEmbeddingProvider::model() const { return "mock-hash-" + std::to_string(dimension_); }

Vector MockEmbeddingProvider::embed_one(const std::string& text) const {
    std::vector<double> acc(dimension_, 0.0);
    for (const auto& tok : tokenize(text)) add_direction(text::fnv1a64(text::to_lower(tok)), acc);
    double sq = 0;
    for (double v : acc) sq += v * v;
    if (sq == 0.0) {
        std::fill(acc.begin(), acc.end(), 0.0);
        add_direction(text::fnv1a64(text) ^ 0x9e3779b97f4a7c15ULL, acc);
    }
    return normalized(acc);
}

std::vector<Vector> MockEmbeddingProvider::embed_batch(const std::vector<std::string>& texts) {
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_one(t));
    return out;
}

RemoteEmbeddingProvider::RemoteEmbeddingProvider(std::shared_ptr<http::Transport> transport,
                                                 RemoteEmbeddingSettings settings)
    : transport_(std::move(transport)), settings_(std::move(settings)) {}

std::vector<Vector> RemoteEmbeddingProvider::embed_batch(const std::vector<std::string>& texts) {
    auto req = http::json_post(settings_.endpoint, json{{"input", texts}, {"model", settings_.model}}.dump(),
                               settings_.api_key_env);

    auto res = http::send_with_retries(*transport_, req, settings_.retries);
    if (!res.ok()) throw ProviderError("embedding endpoint returned HTTP " + std::to_string(res.status));

    std::vector<Vector> out;
    try {
        auto body = json::parse(res.body);
        for (const auto& item : body.at("data")) out.push_back(item.at("embedding").get<Vector>());
    } catch (const json::exception& e) {
        throw ProviderError(std::string("malformed embedding response: ") + e.what());
    }
    return out;
}

std::vector<Vector> embed(const std::vector<std::string>& texts, EmbeddingProvider& provider) {
    for (const auto& t : texts) {
        if (t.empty()) throw ArgumentError("cannot embed an empty string");
    }
    if (texts.empty()) return {};
    auto vectors = provider.embed_batch(texts);
    if (vectors.size() != texts.size()) {
        throw IntegrityError("embedding provider returned " + std::to_string(vectors.size()) +
                             " vectors for " + std::to_string(texts.size()) + " inputs");
    }
    for (const auto& v : vectors) {
        if (v.size() != provider.dimension()) {
            throw IntegrityError("embedding dimension " + std::to_string(v.size()) + " != declared " +
                                 std::to_string(provider.dimension()));
        }
    }
    return vectors;
}

} // namespace oncoagent::index
