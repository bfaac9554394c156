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

#include <nlohmann/json.hpp>

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace oncoagent::tools {

struct WebPage {
    std::string title;
    std::string url;
    std::string text;
};

struct Abstract {
    std::string pmid;
    std::string title;
    std::string abstract;
    bool operator==(const Abstract&) const = default;
};

struct OncoKbRecord {
    std::string gene;
    std::string alteration;
    std::string status; // "found" or "not found"
    std::string oncogenicity;
    std::string evidence_level;
    std::vector<std::string> therapies;
};

/// Exactly one of point / box is set.
struct SegmentationPrompt {
    std::optional<std::array<double, 2>> point;
    std::optional<std::array<double, 4>> box;
};

struct HistologyPrediction {
    std::string label; // positive | negative
    double score = 0;
};

// Clients must be safe for concurrent use.

class WebSearchClient {
public:
    virtual ~WebSearchClient() = default;
    virtual std::vector<WebPage> search(const std::string& query, std::size_t max_results) = 0;
};

class PubMedClient {
public:
    virtual ~PubMedClient() = default;
    virtual std::vector<Abstract> search(const std::string& query, std::size_t max_results) = 0;
};

class OncoKbClient {
public:
    virtual ~OncoKbClient() = default;
    /// nullopt when the knowledge base has no entry.
    virtual std::optional<OncoKbRecord> lookup(const std::string& gene, const std::string& alteration) = 0;
};

class SegmentationClient {
public:
    virtual ~SegmentationClient() = default;
    /// Returns the path of a PBM/PGM mask for `image`.
    virtual std::filesystem::path segment(const std::filesystem::path& image, const SegmentationPrompt& prompt) = 0;
};

class HistologyClient {
public:
    virtual ~HistologyClient() = default;
    virtual HistologyPrediction classify(const std::filesystem::path& features, const std::string& target) = 0;
};

class MockWebSearchClient final : public WebSearchClient {
public:
    /// {"<query key>": [{title, url, text}]}. A key matches when contained
    /// in the lowercased query; the longest matching key wins.
    explicit MockWebSearchClient(nlohmann::json pages);
    std::vector<WebPage> search(const std::string& query, std::size_t max_results) override;

private:
    nlohmann::json pages_;
};

class MockPubMedClient final : public PubMedClient {
public:
    /// {"<query key>": [{pmid, title, abstract}]}, matched like web search.
    explicit MockPubMedClient(nlohmann::json articles);
    std::vector<Abstract> search(const std::string& query, std::size_t max_results) override;

private:
    nlohmann::json articles_;
};

class MockOncoKbClient final : public OncoKbClient {
public:
    /// [{gene, alteration, oncogenicity, evidence_level, therapies}];
    /// gene and alteration compare case-insensitively.
    explicit MockOncoKbClient(nlohmann::json records);
    std::optional<OncoKbRecord> lookup(const std::string& gene, const std::string& alteration) override;

private:
    nlohmann::json records_;
};

class MockSegmentationClient final : public SegmentationClient {
public:
    /// {"<image file name>": "<mask path>"}; relative masks resolve against
    /// base_dir.
    MockSegmentationClient(nlohmann::json masks, std::filesystem::path base_dir);
    std::filesystem::path segment(const std::filesystem::path& image, const SegmentationPrompt& prompt) override;

private:
    nlohmann::json masks_;
    std::filesystem::path base_dir_;
};

class MockHistologyClient final : public HistologyClient {
public:
    /// {"<feature file name>": {"<target>": {label, score}}}.
    explicit MockHistologyClient(nlohmann::json predictions);
    HistologyPrediction classify(const std::filesystem::path& features, const std::string& target) override;

private:
    nlohmann::json predictions_;
};

/// Mock clients built from one fixture file with the sections web_search,
/// pubmed, oncokb, segmentation and histology (all optional).
struct MockServices {
    std::shared_ptr<MockWebSearchClient> web_search;
    std::shared_ptr<MockPubMedClient> pubmed;
    std::shared_ptr<MockOncoKbClient> oncokb;
    std::shared_ptr<MockSegmentationClient> segmentation;
    std::shared_ptr<MockHistologyClient> histology;

    static MockServices from_json(const nlohmann::json& data, const std::filesystem::path& base_dir);
    static MockServices load(const std::filesystem::path& file);
};

struct GoogleSearchSettings {
    std::string endpoint = "https://www.googleapis.com/customsearch/v1";
    std::string api_key_env = "GOOGLE_API_KEY";
    std::string engine_id_env = "GOOGLE_CSE_ID";
    int retries = 3;
};

/// Custom Search JSON API; extracted text comes from result snippets.
class GoogleSearchClient final : public WebSearchClient {
public:
    GoogleSearchClient(std::shared_ptr<http::Transport> transport, GoogleSearchSettings settings = {});
    std::vector<WebPage> search(const std::string& query, std::size_t max_results) override;

private:
    std::shared_ptr<http::Transport> transport_;
    GoogleSearchSettings settings_;
};

struct EutilsSettings {
    std::string base_url = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils";
    std::string api_key_env = "NCBI_API_KEY";
    int retries = 3;
};

/// esearch (JSON) for ids, then efetch (XML) for titles and abstracts.
class EutilsPubMedClient final : public PubMedClient {
public:
    EutilsPubMedClient(std::shared_ptr<http::Transport> transport, EutilsSettings settings = {});
    std::vector<Abstract> search(const std::string& query, std::size_t max_results) override;

private:
    std::shared_ptr<http::Transport> transport_;
    EutilsSettings settings_;
};

/// Parses an efetch PubmedArticleSet document.
std::vector<Abstract> parse_pubmed_articles(const std::string& xml);

struct OncoKbSettings {
    std::string endpoint = "https://www.oncokb.org/api/v1/annotate/mutations/byProteinChange";
    std::string api_key_env = "ONCOKB_API_TOKEN";
    int retries = 3;
};

class OncoKbHttpClient final : public OncoKbClient {
public:
    OncoKbHttpClient(std::shared_ptr<http::Transport> transport, OncoKbSettings settings = {});
    std::optional<OncoKbRecord> lookup(const std::string& gene, const std::string& alteration) override;

private:
    std::shared_ptr<http::Transport> transport_;
    OncoKbSettings settings_;
};

struct ModelServiceSettings {
    std::string endpoint;
    std::string api_key_env;
    std::filesystem::path output_dir = std::filesystem::temp_directory_path();
    int retries = 3;
};

/// POST {image: base64, prompt: {point|box}} -> {mask: base64 PBM/PGM}.
class HttpSegmentationClient final : public SegmentationClient {
public:
    HttpSegmentationClient(std::shared_ptr<http::Transport> transport, ModelServiceSettings settings);
    std::filesystem::path segment(const std::filesystem::path& image, const SegmentationPrompt& prompt) override;

private:
    std::shared_ptr<http::Transport> transport_;
    ModelServiceSettings settings_;
};

/// POST {features: base64, target} -> {label, score}.
class HttpHistologyClient final : public HistologyClient {
public:
    HttpHistologyClient(std::shared_ptr<http::Transport> transport, ModelServiceSettings settings);
    HistologyPrediction classify(const std::filesystem::path& features, const std::string& target) override;

private:
    std::shared_ptr<http::Transport> transport_;
    ModelServiceSettings settings_;
};

nlohmann::json to_json(const OncoKbRecord& r);
nlohmann::json to_json(const Abstract& a);
Abstract abstract_from_json(const nlohmann::json& j);

} // namespace oncoagent::tools
