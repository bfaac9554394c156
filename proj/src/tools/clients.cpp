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

#include "oncoagent/tools/clients.hpp"

#include "oncoagent/common/error.hpp"
#include "oncoagent/common/fs.hpp"
#include "oncoagent/common/text.hpp"
#include "oncoagent/corpus/xml.hpp"

#include <cstdlib>
#include <cstdio>

namespace oncoagent::tools {

using nlohmann::json;

namespace {

// Longest key contained in the lowercased query, or nullptr.
const json* match_query(const json& table, const std::string& query) {
    const auto q = text::normalize_for_dedup(query);
    const json* best = nullptr;
    std::size_t best_len = 0;
    for (const auto& [key, value] : table.items()) {
        auto k = text::normalize_for_dedup(key);
        if (!k.empty() && q.find(k) != std::string::npos && k.size() > best_len) {
            best = &value;
            best_len = k.size();
        }
    }
    return best;
}

std::string env_or_empty(const std::string& name) {
    const char* v = name.empty() ? nullptr : std::getenv(name.c_str());
    return v ? std::string(v) : std::string();
}

std::string require_env(const std::string& name) {
    auto v = env_or_empty(name);
    if (v.empty()) throw ProviderError("environment variable " + name + " is not set");
    return v;
}

json get_json(http::Transport& transport, const std::string& url, int retries,
              std::vector<std::pair<std::string, std::string>> headers = {}) {
    http::Request req;
    req.method = "GET";
    req.url = url;
    req.headers = std::move(headers);
    auto res = http::send_with_retries(transport, req, retries);
    if (!res.ok()) throw ProviderError("GET " + url + " returned HTTP " + std::to_string(res.status));
    return json::parse(res.body);
}

json post_json(http::Transport& transport, const std::string& url, const json& body,
               const std::string& api_key_env, int retries) {
    auto res = http::send_with_retries(transport, http::json_post(url, body.dump(), api_key_env), retries);
    if (!res.ok()) throw ProviderError("POST " + url + " returned HTTP " + std::to_string(res.status));
    return json::parse(res.body);
}

void require_file(const std::filesystem::path& p, const std::string& what) {
    if (!std::filesystem::is_regular_file(p)) throw ArgumentError(what + " not found: " + p.string());
}

} // namespace

MockWebSearchClient::MockWebSearchClient(json pages) : pages_(std::move(pages)) {}

std::vector<WebPage> MockWebSearchClient::search(const std::string& query, std::size_t max_results) {
    std::vector<WebPage> out;
    const json* hit = match_query(pages_, query);
    if (!hit) return out;
    for (const auto& p : *hit) {
        if (out.size() >= max_results) break;
        out.push_back({p.value("title", ""), p.value("url", ""), p.value("text", "")});
    }
    return out;
}

MockPubMedClient::MockPubMedClient(json articles) : articles_(std::move(articles)) {}

std::vector<Abstract> MockPubMedClient::search(const std::string& query, std::size_t max_results) {
    std::vector<Abstract> out;
    const json* hit = match_query(articles_, query);
    if (!hit) return out;
    for (const auto& a : *hit) {
        if (out.size() >= max_results) break;
        out.push_back(abstract_from_json(a));
    }
    return out;
}

MockOncoKbClient::MockOncoKbClient(json records) : records_(std::move(records)) {}

std::optional<OncoKbRecord> MockOncoKbClient::lookup(const std::string& gene, const std::string& alteration) {
    for (const auto& r : records_) {
        if (text::to_lower(r.value("gene", "")) != text::to_lower(text::trim(gene))) continue;
        if (text::to_lower(r.value("alteration", "")) != text::to_lower(text::trim(alteration))) continue;
        OncoKbRecord rec;
        rec.gene = r.value("gene", "");
        rec.alteration = r.value("alteration", "");
        rec.status = "found";
        rec.oncogenicity = r.value("oncogenicity", "");
        rec.evidence_level = r.value("evidence_level", "");
        rec.therapies = r.value("therapies", std::vector<std::string>{});
        return rec;
    }
    return std::nullopt;
}

MockSegmentationClient::MockSegmentationClient(json masks, std::filesystem::path base_dir)
    : masks_(std::move(masks)), base_dir_(std::move(base_dir)) {}

std::filesystem::path MockSegmentationClient::segment(const std::filesystem::path& image, const SegmentationPrompt&) {
    require_file(image, "image");
    const auto key = image.filename().string();
    if (!masks_.contains(key)) throw ProviderError("segmentation mock has no mask for " + key);
    return fs::resolve(base_dir_, masks_.at(key).get<std::string>());
}

MockHistologyClient::MockHistologyClient(json predictions) : predictions_(std::move(predictions)) {}

HistologyPrediction MockHistologyClient::classify(const std::filesystem::path& features, const std::string& target) {
    require_file(features, "feature file");
    const auto key = features.filename().string();
    if (!predictions_.contains(key) || !predictions_.at(key).contains(target)) {
        throw ProviderError("histology mock has no " + target + " prediction for " + key);
    }
    const auto& p = predictions_.at(key).at(target);
    return {p.at("label").get<std::string>(), p.at("score").get<double>()};
}

MockServices MockServices::from_json(const json& data, const std::filesystem::path& base_dir) {
    MockServices m;
    m.web_search = std::make_shared<MockWebSearchClient>(data.value("web_search", json::object()));
    m.pubmed = std::make_shared<MockPubMedClient>(data.value("pubmed", json::object()));
    m.oncokb = std::make_shared<MockOncoKbClient>(data.value("oncokb", json::array()));
    m.segmentation = std::make_shared<MockSegmentationClient>(data.value("segmentation", json::object()), base_dir);
    m.histology = std::make_shared<MockHistologyClient>(data.value("histology", json::object()));
    return m;
}

MockServices MockServices::load(const std::filesystem::path& file) {
    json data;
    try {
        data = json::parse(fs::read_file(file));
    } catch (const json::exception& e) {
        throw ParseError(file.string() + ": " + e.what(), 0);
    }
    return from_json(data, file.parent_path());
}

GoogleSearchClient::GoogleSearchClient(std::shared_ptr<http::Transport> transport, GoogleSearchSettings settings)
    : transport_(std::move(transport)), settings_(std::move(settings)) {}

std::vector<WebPage> GoogleSearchClient::search(const std::string& query, std::size_t max_results) {
    const auto num = std::min<std::size_t>(10, std::max<std::size_t>(1, max_results));
    auto url = settings_.endpoint + "?key=" + http::url_encode(require_env(settings_.api_key_env)) +
               "&cx=" + http::url_encode(require_env(settings_.engine_id_env)) + "&q=" + http::url_encode(query) +
               "&num=" + std::to_string(num);
    auto body = get_json(*transport_, url, settings_.retries);
    std::vector<WebPage> out;
    for (const auto& item : body.value("items", json::array())) {
        if (out.size() >= max_results) break;
        out.push_back({item.value("title", ""), item.value("link", ""), item.value("snippet", "")});
    }
    return out;
}

EutilsPubMedClient::EutilsPubMedClient(std::shared_ptr<http::Transport> transport, EutilsSettings settings)
    : transport_(std::move(transport)), settings_(std::move(settings)) {}

std::vector<Abstract> EutilsPubMedClient::search(const std::string& query, std::size_t max_results) {
    std::string key_param;
    if (auto key = env_or_empty(settings_.api_key_env); !key.empty()) key_param = "&api_key=" + http::url_encode(key);
    auto ids_body = get_json(*transport_,
                             settings_.base_url + "/esearch.fcgi?db=pubmed&retmode=json&retmax=" +
                                 std::to_string(max_results) + "&term=" + http::url_encode(query) + key_param,
                             settings_.retries);
    auto ids = ids_body.at("esearchresult").value("idlist", std::vector<std::string>{});
    if (ids.empty()) return {};
    http::Request req;
    req.method = "GET";
    req.url = settings_.base_url + "/efetch.fcgi?db=pubmed&retmode=xml&id=" + text::join(ids, ",") + key_param;
    auto res = http::send_with_retries(*transport_, req, settings_.retries);
    if (!res.ok()) throw ProviderError("efetch returned HTTP " + std::to_string(res.status));
    auto out = parse_pubmed_articles(res.body);
    if (out.size() > max_results) out.resize(max_results);
    return out;
}

std::vector<Abstract> parse_pubmed_articles(const std::string& xml_text) {
    auto root = xml::parse(xml_text);
    std::vector<Abstract> out;
    for (const auto* article : root->children_named("PubmedArticle")) {
        Abstract a;
        if (const auto* pmid = article->find("PMID")) a.pmid = text::trim(pmid->text());
        if (const auto* title = article->find("ArticleTitle")) a.title = text::collapse_whitespace(title->text());
        if (const auto* abs = article->find("Abstract")) {
            std::vector<std::string> parts;
            for (const auto* t : abs->children_named("AbstractText")) {
                auto body = text::collapse_whitespace(t->text());
                auto label = t->attr("Label");
                parts.push_back(label.empty() ? body : label + ": " + body);
            }
            a.abstract = text::join(parts, " ");
        }
        if (!a.pmid.empty()) out.push_back(std::move(a));
    }
    return out;
}

OncoKbHttpClient::OncoKbHttpClient(std::shared_ptr<http::Transport> transport, OncoKbSettings settings)
    : transport_(std::move(transport)), settings_(std::move(settings)) {}

std::optional<OncoKbRecord> OncoKbHttpClient::lookup(const std::string& gene, const std::string& alteration) {
    auto url = settings_.endpoint + "?hugoSymbol=" + http::url_encode(gene) +
               "&alteration=" + http::url_encode(alteration);
    auto body = get_json(*transport_, url, settings_.retries,
                         {{"Authorization", "Bearer " + require_env(settings_.api_key_env)},
                          {"Accept", "application/json"}});
    if (!body.value("geneExist", false) || !body.value("variantExist", false)) return std::nullopt;
    OncoKbRecord rec;
    rec.gene = gene;
    rec.alteration = alteration;
    rec.status = "found";
    rec.oncogenicity = body.value("oncogenic", "");
    if (body.contains("highestSensitiveLevel") && body.at("highestSensitiveLevel").is_string()) {
        rec.evidence_level = body.at("highestSensitiveLevel").get<std::string>();
    }
    for (const auto& t : body.value("treatments", json::array())) {
        std::vector<std::string> drugs;
        for (const auto& d : t.value("drugs", json::array())) drugs.push_back(d.value("drugName", ""));
        auto name = text::join(drugs, " + ");
        if (!name.empty() && std::find(rec.therapies.begin(), rec.therapies.end(), name) == rec.therapies.end()) {
            rec.therapies.push_back(name);
        }
    }
    return rec;
}

HttpSegmentationClient::HttpSegmentationClient(std::shared_ptr<http::Transport> transport,
                                               ModelServiceSettings settings)
    : transport_(std::move(transport)), settings_(std::move(settings)) {}

std::filesystem::path HttpSegmentationClient::segment(const std::filesystem::path& image,
                                                      const SegmentationPrompt& prompt) {
    require_file(image, "image");
    json p = json::object();
    if (prompt.point) p["point"] = *prompt.point;
    if (prompt.box) p["box"] = *prompt.box;
    auto body = post_json(*transport_, settings_.endpoint,
                          {{"image", http::base64_encode(fs::read_file(image))}, {"prompt", p}},
                          settings_.api_key_env, settings_.retries);
    auto mask = http::base64_decode(body.at("mask").get<std::string>());
    char suffix[17];
    std::snprintf(suffix, sizeof suffix, "%016llx",
                  static_cast<unsigned long long>(text::fnv1a64(image.string() + p.dump())));
    auto out = settings_.output_dir / (image.stem().string() + "-mask-" + suffix + ".pnm");
    fs::write_file_atomic(out, mask);
    return out;
}

HttpHistologyClient::HttpHistologyClient(std::shared_ptr<http::Transport> transport, ModelServiceSettings settings)
    : transport_(std::move(transport)), settings_(std::move(settings)) {}

HistologyPrediction HttpHistologyClient::classify(const std::filesystem::path& features, const std::string& target) {
    require_file(features, "feature file");
    auto body = post_json(*transport_, settings_.endpoint,
                          {{"features", http::base64_encode(fs::read_file(features))}, {"target", target}},
                          settings_.api_key_env, settings_.retries);
    return {body.at("label").get<std::string>(), body.at("score").get<double>()};
}

json to_json(const OncoKbRecord& r) {
    return {{"gene", r.gene},
            {"alteration", r.alteration},
            {"status", r.status},
            {"oncogenicity", r.oncogenicity},
            {"evidence_level", r.evidence_level},
            {"therapies", r.therapies}};
}

json to_json(const Abstract& a) { return {{"pmid", a.pmid}, {"title", a.title}, {"abstract", a.abstract}}; }

Abstract abstract_from_json(const json& j) {
    return {j.at("pmid").get<std::string>(), j.value("title", ""), j.value("abstract", "")};
}

} // namespace oncoagent::tools
