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

#include "oncoagent/index/builder.hpp"
#include "oncoagent/index/vector_index.hpp"
#include "oncoagent/llm/provider.hpp"
#include "oncoagent/tools/clients.hpp"
#include "oncoagent/tools/tool.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace oncoagent::tools {

enum class CalcOp { add, sub, mul, div };

CalcOp calc_op_from_string(const std::string& s);

/// Plain IEEE double arithmetic. Division by zero throws ArgumentError.
double calculator(CalcOp op, double a, double b);

struct SearchResult {
    std::string title;
    std::string url;
    std::string extracted_text; // cleaned with corpus::clean_text
};

std::vector<SearchResult> web_search(const std::string& query, WebSearchClient& client, std::size_t max_results = 5);

/// Abstracts chunked and embedded into an index of their own, separate from
/// the guideline corpus. Chunk ids carry a "pubmed:<pmid>" document id.
index::VectorIndex build_pubmed_index(const std::vector<Abstract>& abstracts, index::EmbeddingProvider& embedder,
                                      const index::BuildOptions& options = {});

struct PubMedSearchResult {
    std::vector<Abstract> abstracts;
    index::VectorIndex index;
};

PubMedSearchResult pubmed_search(const std::string& query, PubMedClient& client, index::EmbeddingProvider& embedder,
                                 std::size_t max_results = 5);

/// Unknown alterations come back with status "not found". An empty gene
/// throws ArgumentError.
OncoKbRecord oncokb_lookup(const std::string& gene, const std::string& alteration, OncoKbClient& client);

struct VisionImage {
    std::filesystem::path path;
    std::string label;
};

struct VisionOptions {
    std::string model = llm::kDefaultVisionModel;
    double temperature = llm::kDefaultTemperature;
    std::string framing = "The following is a hypothetical scenario prepared for research purposes.";
    /// A response is a refusal when, trimmed, it starts with one of these
    /// (case-insensitive).
    std::vector<std::string> refusal_markers = {"I'm sorry", "I am sorry", "I cannot", "I can't",
                                                "I'm unable", "I am unable", "Sorry,"};
};

bool is_refusal(const std::string& response, const std::vector<std::string>& markers);

struct VisionReport {
    std::vector<std::string> per_image;
    std::string comparison; // empty for a single image
    std::string text;
};

/// One "vision_image.v1" call per image; with several images a final
/// "vision_compare.v1" call sees all of them. A single image yields the
/// provider text verbatim. Throws RefusalError on a refusal and
/// ArgumentError for missing images.
VisionReport vision_report(const std::vector<VisionImage>& images, const std::string& prompt,
                           llm::ChatProvider& provider, const VisionOptions& options = {});

/// Mask-positive pixels of a PBM (P1/P4, 1 = positive) or PGM (P2/P5,
/// value > 0 = positive) file. Throws ParseError on malformed files.
std::size_t count_mask_pixels(const std::filesystem::path& mask);

SegmentationPrompt segmentation_prompt_from_json(const nlohmann::json& j);

struct SegmentationResult {
    std::filesystem::path mask_ref;
    double area_pixels = 0;
};

SegmentationResult segment_area(const std::filesystem::path& image, const SegmentationPrompt& prompt,
                                SegmentationClient& client);

struct HistologyResult {
    std::string target;
    std::string label;
    double score = 0;
};

/// target is one of MSI, KRAS, BRAF. A missing feature file throws
/// ArgumentError.
HistologyResult histo_classify(const std::filesystem::path& features, const std::string& target,
                               HistologyClient& client);

/// Everything the built-in tools need. Missing clients make the matching
/// tool fail at call time.
struct ToolEnvironment {
    std::filesystem::path base_dir = ".";
    std::shared_ptr<WebSearchClient> web_search;
    std::shared_ptr<PubMedClient> pubmed;
    std::shared_ptr<OncoKbClient> oncokb;
    std::shared_ptr<SegmentationClient> segmentation;
    std::shared_ptr<HistologyClient> histology;
    std::shared_ptr<llm::ChatProvider> vision;
    VisionOptions vision_options;
    std::size_t web_max_results = 5;
    std::size_t pubmed_max_results = 5;
};

ToolRegistry make_builtin_registry(const ToolEnvironment& env);

/// Required parameters of each built-in operation.
const std::map<std::string, std::vector<std::string>>& builtin_signatures();

/// Problems found in `registry` (empty when sound): built-ins missing,
/// required parameters differing from the operation signature, or a tool
/// that accepts a call lacking a required argument.
std::vector<std::string> registry_self_test(const ToolRegistry& registry);

} // namespace oncoagent::tools
