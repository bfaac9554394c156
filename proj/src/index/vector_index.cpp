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

#include "oncoagent/index/vector_index.hpp"

#include "oncoagent/common/error.hpp"
#include "oncoagent/common/fs.hpp"
#include "oncoagent/common/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <mutex>

namespace oncoagent::index {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "index files are little-endian");

namespace {

constexpr char kMagic[8] = {'O', 'N', 'C', 'O', 'I', 'D', 'X', '\0'};

double dot(std::span<const float> a, std::span<const float> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return s;
}

template <typename T>
void put(std::string& out, T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.append(buf, sizeof(T));
}

class ByteReader {
public:
    explicit ByteReader(std::string_view data) : data_(data) {}

    template <typename T>
    T get(const char* what) {
        need(sizeof(T), what);
        T v;
        std::memcpy(&v, data_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }

    std::string_view bytes(std::size_t n, const char* what) {
        need(n, what);
        auto out = data_.substr(pos_, n);
        pos_ += n;
        return out;
    }

    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    void need(std::size_t n, const char* what) const {
        if (data_.size() - pos_ < n) {
            throw CorruptionError(std::string("index file truncated while reading ") + what);
        }
    }

    std::string_view data_;
    std::size_t pos_ = 0;
};

json chunk_to_json(const Chunk& c) {
    return json{{"doc_id", c.doc_id},   {"chunk_id", c.chunk_id}, {"window", c.window},
                {"token_start", c.token_start}, {"token_len", c.token_len}, {"text", c.text},
                {"metadata", c.metadata}};
}

Chunk chunk_from_json(const json& j) {
    Chunk c;
    c.doc_id = j.at("doc_id").get<std::string>();
    c.chunk_id = j.at("chunk_id").get<std::string>();
    c.window = j.at("window").get<int>();
    c.token_start = j.at("token_start").get<int>();
    c.token_len = j.at("token_len").get<int>();
    c.text = j.at("text").get<std::string>();
    c.metadata = j.at("metadata").get<Metadata>();
    return c;
}

} // namespace

double l2_norm(std::span<const float> v) { return std::sqrt(dot(v, v)); }

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) throw ArgumentError("cosine_similarity: dimension mismatch");
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (na == 0.0 || nb == 0.0) throw ArgumentError("cosine_similarity: zero vector");
    return dot(a, b) / (na * nb);
}

VectorIndex::VectorIndex(std::size_t dimension, std::string model)
    : dimension_(dimension), model_(std::move(model)), mu_(std::make_unique<std::shared_mutex>()) {
    if (dimension_ == 0) throw ArgumentError("index dimension must be positive");
}

VectorIndex::VectorIndex(VectorIndex&&) noexcept = default;
VectorIndex& VectorIndex::operator=(VectorIndex&&) noexcept = default;
VectorIndex::~VectorIndex() = default;

std::size_t VectorIndex::size() const {
    std::shared_lock lock(*mu_);
    return chunks_.size();
}

void VectorIndex::add(Chunk chunk, Vector vector) {
    if (vector.size() != dimension_) {
        throw ArgumentError("vector dimension " + std::to_string(vector.size()) + " != index dimension " +
                            std::to_string(dimension_));
    }
    const double norm = l2_norm(vector);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw ArgumentError("cannot index a zero or non-finite vector for " + chunk.chunk_id);
    }
    std::unique_lock lock(*mu_);
    if (position_.count(chunk.chunk_id)) throw IntegrityError("duplicate chunk id " + chunk.chunk_id);
    position_.emplace(chunk.chunk_id, chunks_.size());
    matrix_.insert(matrix_.end(), vector.begin(), vector.end());
    norms_.push_back(norm);
    chunks_.push_back(std::move(chunk));
}

std::vector<SearchHit> VectorIndex::search(std::span<const float> query, std::size_t top_n,
                                           const ChunkFilter& filter) const {
    if (query.size() != dimension_) {
        throw ArgumentError("query dimension " + std::to_string(query.size()) + " != index dimension " +
                            std::to_string(dimension_));
    }
    if (top_n < 1) throw ArgumentError("top_n must be >= 1");
    const double qn = l2_norm(query);
    if (!(qn > 0.0)) throw ArgumentError("query vector has zero norm");

    std::shared_lock lock(*mu_);
    std::vector<SearchHit> hits;
    hits.reserve(chunks_.size());
    for (std::size_t i = 0; i < chunks_.size(); ++i) {
        if (filter && !filter(chunks_[i])) continue;
        std::span<const float> row(matrix_.data() + i * dimension_, dimension_);
        hits.push_back({chunks_[i].chunk_id, dot(query, row) / (qn * norms_[i])});
    }
    auto better = [](const SearchHit& a, const SearchHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.chunk_id < b.chunk_id;
    };
    const std::size_t keep = std::min(top_n, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(), better);
    hits.resize(keep);
    return hits;
}

const Chunk* VectorIndex::find_chunk(const std::string& chunk_id) const {
    std::shared_lock lock(*mu_);
    auto it = position_.find(chunk_id);
    return it == position_.end() ? nullptr : &chunks_[it->second];
}

const Chunk& VectorIndex::chunk(const std::string& chunk_id) const {
    if (const auto* c = find_chunk(chunk_id)) return *c;
    throw ArgumentError("unknown chunk id " + chunk_id);
}

std::vector<EmbeddingRecord> VectorIndex::records() const {
    std::shared_lock lock(*mu_);
    std::vector<EmbeddingRecord> out;
    out.reserve(chunks_.size());
    for (std::size_t i = 0; i < chunks_.size(); ++i) {
        auto begin = matrix_.begin() + static_cast<std::ptrdiff_t>(i * dimension_);
        out.push_back({chunks_[i].chunk_id, Vector(begin, begin + static_cast<std::ptrdiff_t>(dimension_)),
                       static_cast<float>(norms_[i])});
    }
    return out;
}

std::vector<Chunk> VectorIndex::chunks() const {
    std::shared_lock lock(*mu_);
    return chunks_;
}

// Layout: magic[8] | u32 version | u32 dimension | u64 count |
//         u64 table_len | chunk table JSON | count*dimension f32 | u64 fnv1a64(all previous bytes)
void VectorIndex::persist(const std::filesystem::path& path) const {
    std::shared_lock lock(*mu_);
    json table = json::array();
    for (const auto& c : chunks_) table.push_back(chunk_to_json(c));
    const std::string table_bytes = json{{"model", model_}, {"chunks", table}}.dump();

    std::string out(kMagic, sizeof kMagic);
    put<std::uint32_t>(out, kFormatVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(dimension_));
    put<std::uint64_t>(out, chunks_.size());
    put<std::uint64_t>(out, table_bytes.size());
    out += table_bytes;
    out.append(reinterpret_cast<const char*>(matrix_.data()), matrix_.size() * sizeof(float));
    put<std::uint64_t>(out, text::fnv1a64(out));
    fs::write_file_atomic(path, out);
}

VectorIndex VectorIndex::load(const std::filesystem::path& path) {
    const std::string data = fs::read_file(path);
    ByteReader r(data);
    auto magic = r.bytes(sizeof kMagic, "magic");
    if (std::memcmp(magic.data(), kMagic, sizeof kMagic) != 0) {
        throw CorruptionError(path.string() + " is not an index file (bad magic)");
    }
    const auto version = r.get<std::uint32_t>("version");
    if (version != kFormatVersion) {
        throw CorruptionError("unsupported index version " + std::to_string(version) + " (expected " +
                              std::to_string(kFormatVersion) + ")");
    }
    const auto dimension = r.get<std::uint32_t>("dimension");
    const auto count = r.get<std::uint64_t>("count");
    const auto table_len = r.get<std::uint64_t>("table length");
    if (dimension == 0) throw CorruptionError("index header declares dimension 0");
    const auto table_bytes = r.bytes(table_len, "chunk table");
    if (count > r.remaining() / (static_cast<std::uint64_t>(dimension) * sizeof(float))) {
        throw CorruptionError("index file truncated while reading vectors");
    }
    const std::size_t matrix_bytes = count * dimension * sizeof(float);
    const auto matrix = r.bytes(matrix_bytes, "vectors");
    const std::size_t payload_end = r.pos();
    const auto checksum = r.get<std::uint64_t>("checksum");
    if (r.remaining() != 0) throw CorruptionError("trailing bytes after index checksum");
    if (checksum != text::fnv1a64(std::string_view(data).substr(0, payload_end))) {
        throw CorruptionError("index checksum mismatch");
    }

    json table;
    try {
        table = json::parse(table_bytes);
    } catch (const json::exception& e) {
        throw CorruptionError(std::string("malformed chunk table: ") + e.what());
    }
    VectorIndex index(dimension, table.value("model", ""));
    try {
        const auto& chunks = table.at("chunks");
        if (chunks.size() != count) throw CorruptionError("chunk table size does not match header count");
        for (std::size_t i = 0; i < count; ++i) {
            Vector v(dimension);
            std::memcpy(v.data(), matrix.data() + i * dimension * sizeof(float), dimension * sizeof(float));
            index.add(chunk_from_json(chunks.at(i)), std::move(v));
        }
    } catch (const json::exception& e) {
        throw CorruptionError(std::string("malformed chunk table: ") + e.what());
    } catch (const ArgumentError& e) {
        throw CorruptionError(std::string("invalid record: ") + e.what());
    } catch (const IntegrityError& e) {
        throw CorruptionError(std::string("invalid record: ") + e.what());
    }
    return index;
}

} // namespace oncoagent::index
