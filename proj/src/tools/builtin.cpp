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

#include "oncoagent/tools/builtin.hpp"

#include "oncoagent/common/error.hpp"
#include "oncoagent/common/fs.hpp"
#include "oncoagent/common/text.hpp"
#include "oncoagent/corpus/clean.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

namespace oncoagent::tools {

using nlohmann::json;

CalcOp calc_op_from_string(const std::string& s) {
    if (s == "add") return CalcOp::add;
    if (s == "sub") return CalcOp::sub;
    if (s == "mul") return CalcOp::mul;
    if (s == "div") return CalcOp::div;
    throw ArgumentError("unknown calculator op '" + s + "' (expected add, sub, mul or div)");
}

double calculator(CalcOp op, double a, double b) {
    switch (op) {
    case CalcOp::add: return a + b;
    case CalcOp::sub: return a - b;
    case CalcOp::mul: return a * b;
    case CalcOp::div:
        if (b == 0) throw ArgumentError("division by zero");
        return a / b;
    }
    throw ArgumentError("unknown calculator op");
}

std::vector<SearchResult> web_search(const std::string& query, WebSearchClient& client, std::size_t max_results) {
    if (text::trim(query).empty()) throw ArgumentError("web_search: empty query");
    std::vector<SearchResult> out;
    for (auto& page : client.search(query, max_results)) {
        if (out.size() >= max_results) break;
        out.push_back({page.title, page.url, corpus::clean_text(page.text)});
    }
    return out;
}

index::VectorIndex build_pubmed_index(const std::vector<Abstract>& abstracts, index::EmbeddingProvider& embedder,
                                      const index::BuildOptions& options) {
    std::vector<corpus::CuratedDocument> docs;
    for (const auto& a : abstracts) {
        corpus::CuratedDocument d;
        d.id = "pubmed:" + a.pmid;
        d.metadata.source = corpus::Source::custom;
        d.metadata.title = a.title;
        d.metadata.url = "https://pubmed.ncbi.nlm.nih.gov/" + a.pmid + "/";
        d.text = corpus::clean_text(a.title.empty() ? a.abstract : a.title + "\n\n" + a.abstract);
        docs.push_back(std::move(d));
    }
    return index::build_index(docs, embedder, options);
}

PubMedSearchResult pubmed_search(const std::string& query, PubMedClient& client, index::EmbeddingProvider& embedder,
                                 std::size_t max_results) {
    auto abstracts = client.search(query, max_results);
    auto idx = build_pubmed_index(abstracts, embedder);
    return {std::move(abstracts), std::move(idx)};
}

OncoKbRecord oncokb_lookup(const std::string& gene, const std::string& alteration, OncoKbClient& client) {
    if (text::trim(gene).empty()) throw ArgumentError("oncokb_lookup: gene must not be empty");
    if (auto rec = client.lookup(text::trim(gene), text::trim(alteration))) return *rec;
    OncoKbRecord miss;
    miss.gene = text::trim(gene);
    miss.alteration = text::trim(alteration);
    miss.status = "not found";
    return miss;
}

bool is_refusal(const std::string& response, const std::vector<std::string>& markers) {
    const auto head = text::to_lower(text::trim(response));
    return std::any_of(markers.begin(), markers.end(), [&](const std::string& m) {
        auto lm = text::to_lower(m);
        return !lm.empty() && head.rfind(lm, 0) == 0;
    });
}

VisionReport vision_report(const std::vector<VisionImage>& images, const std::string& prompt,
                           llm::ChatProvider& provider, const VisionOptions& options) {
    if (images.empty()) throw ArgumentError("vision_report: at least one image is required");
    for (const auto& img : images) {
        if (!std::filesystem::is_regular_file(img.path)) throw ArgumentError("image not found: " + img.path.string());
    }
    auto ask = [&](llm::ChatRequest req) {
        req.model = options.model;
        req.temperature = options.temperature;
        auto out = provider.complete(req);
        if (is_refusal(out, options.refusal_markers)) throw RefusalError("vision model refused: " + text::trim(out));
        return out;
    };
    auto label_of = [&](std::size_t i) {
        return images[i].label.empty() ? images[i].path.filename().string() : images[i].label;
    };

    VisionReport report;
    for (std::size_t i = 0; i < images.size(); ++i) {
        llm::ChatRequest req;
        req.template_id = "vision_image.v1";
        req.variables = {{"framing", options.framing},
                         {"prompt", prompt},
                         {"image_label", label_of(i)},
                         {"image_index", std::to_string(i + 1)},
                         {"image_count", std::to_string(images.size())}};
        req.images = {images[i].path};
        report.per_image.push_back(ask(req));
    }
    if (images.size() == 1) {
        report.text = report.per_image.front();
        return report;
    }
    std::string sections;
    for (std::size_t i = 0; i < images.size(); ++i) {
        sections += "Image " + std::to_string(i + 1) + " (" + label_of(i) + "):\n" + report.per_image[i] + "\n\n";
    }
    llm::ChatRequest cmp;
    cmp.template_id = "vision_compare.v1";
    cmp.variables = {{"framing", options.framing}, {"prompt", prompt}, {"reports", text::trim(sections)}};
    for (const auto& img : images) cmp.images.push_back(img.path);
    report.comparison = ask(cmp);
    report.text = sections + "Comparison:\n" + report.comparison;
    return report;
}

namespace {

class PnmReader {
public:
    explicit PnmReader(std::string data) : data_(std::move(data)) {}

    std::string magic() {
        if (data_.size() < 2 || data_[0] != 'P') throw ParseError("not a PBM/PGM file", 0);
        pos_ = 2;
        return data_.substr(0, 2);
    }

    long header_int() {
        skip_space_and_comments();
        std::size_t start = pos_;
        while (pos_ < data_.size() && std::isdigit(static_cast<unsigned char>(data_[pos_]))) ++pos_;
        if (start == pos_) throw ParseError("malformed PNM header", pos_);
        return std::stol(data_.substr(start, pos_ - start));
    }

    // Exactly one whitespace byte separates the header from binary data.
    void end_header() {
        if (pos_ >= data_.size() || !std::isspace(static_cast<unsigned char>(data_[pos_]))) {
            throw ParseError("malformed PNM header", pos_);
        }
        ++pos_;
    }

    void skip_space_and_comments() {
        while (pos_ < data_.size()) {
            if (data_[pos_] == '#') {
                while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(data_[pos_]))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::size_t pos_ = 0;
    std::string data_;
};

} // namespace

std::size_t count_mask_pixels(const std::filesystem::path& mask) {
    PnmReader r(fs::read_file(mask));
    const auto magic = r.magic();
    if (magic != "P1" && magic != "P2" && magic != "P4" && magic != "P5") {
        throw ParseError(mask.string() + ": unsupported mask format " + magic, 0);
    }
    const long width = r.header_int();
    const long height = r.header_int();
    if (width <= 0 || height <= 0) throw ParseError(mask.string() + ": invalid mask size", r.pos_);
    const auto pixels = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    long maxval = 1;
    if (magic == "P2" || magic == "P5") maxval = r.header_int();
    if (maxval <= 0 || maxval > 65535) throw ParseError(mask.string() + ": invalid maxval", r.pos_);

    std::size_t positive = 0;
    if (magic == "P1") {
        for (std::size_t seen = 0; seen < pixels; ++seen) {
            r.skip_space_and_comments();
            if (r.pos_ >= r.data_.size()) throw ParseError(mask.string() + ": truncated mask", r.pos_);
            char c = r.data_[r.pos_++];
            if (c != '0' && c != '1') throw ParseError(mask.string() + ": invalid PBM pixel", r.pos_ - 1);
            positive += c == '1';
        }
    } else if (magic == "P2") {
        for (std::size_t seen = 0; seen < pixels; ++seen) {
            if (r.header_int() > 0) ++positive;
        }
    } else if (magic == "P4") {
        r.end_header();
        const auto row_bytes = (static_cast<std::size_t>(width) + 7) / 8;
        if (r.data_.size() - r.pos_ < row_bytes * static_cast<std::size_t>(height)) {
            throw ParseError(mask.string() + ": truncated mask", r.data_.size());
        }
        for (long y = 0; y < height; ++y) {
            for (long x = 0; x < width; ++x) {
                auto byte = static_cast<unsigned char>(r.data_[r.pos_ + static_cast<std::size_t>(y) * row_bytes +
                                                              static_cast<std::size_t>(x) / 8]);
                positive += (byte >> (7 - x % 8)) & 1u;
            }
        }
    } else {
        r.end_header();
        const std::size_t bytes_per = maxval > 255 ? 2 : 1;
        if (r.data_.size() - r.pos_ < pixels * bytes_per) {
            throw ParseError(mask.string() + ": truncated mask", r.data_.size());
        }
        for (std::size_t i = 0; i < pixels; ++i) {
            const auto* p = reinterpret_cast<const unsigned char*>(r.data_.data() + r.pos_ + i * bytes_per);
            unsigned value = bytes_per == 2 ? (p[0] << 8u) | p[1] : p[0];
            positive += value > 0;
        }
    }
    return positive;
}

SegmentationPrompt segmentation_prompt_from_json(const json& j) {
    if (!j.is_object()) throw ArgumentError("segmentation prompt must be an object with 'point' or 'box'");
    SegmentationPrompt p;
    auto coords = [](const json& v, std::size_t n, const char* what) {
        if (!v.is_array() || v.size() != n) {
            throw ArgumentError(std::string("segmentation ") + what + " needs " + std::to_string(n) + " numbers");
        }
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number() || x.get<double>() < 0) {
                throw ArgumentError(std::string("segmentation ") + what + " coordinates must be non-negative numbers");
            }
            out.push_back(x.get<double>());
        }
        return out;
    };
    if (j.contains("point")) {
        auto v = coords(j.at("point"), 2, "point");
        p.point = std::array<double, 2>{v[0], v[1]};
    }
    if (j.contains("box")) {
        auto v = coords(j.at("box"), 4, "box");
        if (v[0] >= v[2] || v[1] >= v[3]) throw ArgumentError("segmentation box must have x0 < x1 and y0 < y1");
        p.box = std::array<double, 4>{v[0], v[1], v[2], v[3]};
    }
    if (p.point.has_value() == p.box.has_value()) {
        throw ArgumentError("segmentation prompt needs exactly one of 'point' or 'box'");
    }
    return p;
}

SegmentationResult segment_area(const std::filesystem::path& image, const SegmentationPrompt& prompt,
                                SegmentationClient& client) {
    if (!std::filesystem::is_regular_file(image)) throw ArgumentError("image not found: " + image.string());
    auto mask = client.segment(image, prompt);
    return {mask, static_cast<double>(count_mask_pixels(mask))};
}

HistologyResult histo_classify(const std::filesystem::path& features, const std::string& target,
                               HistologyClient& client) {
    if (target != "MSI" && target != "KRAS" && target != "BRAF") {
        throw ArgumentError("histo_classify: unknown target '" + target + "' (expected MSI, KRAS or BRAF)");
    }
    if (!std::filesystem::is_regular_file(features)) {
        throw ArgumentError("feature file not found: " + features.string());
    }
    auto p = client.classify(features, target);
    if (p.label != "positive" && p.label != "negative") {
        throw ProviderError("histology classifier returned label '" + p.label + "'");
    }
    if (!(p.score >= 0 && p.score <= 1)) throw ProviderError("histology classifier score outside [0, 1]");
    return {target, p.label, p.score};
}

namespace {

class FunctionTool final : public Tool {
public:
    using Fn = std::function<ToolOutput(const json&)>;
    FunctionTool(ToolSpec spec, Fn fn) : spec_(std::move(spec)), fn_(std::move(fn)) {}
    const ToolSpec& spec() const override { return spec_; }
    ToolOutput invoke(const json& args) override { return fn_(args); }

private:
    ToolSpec spec_;
    Fn fn_;
};

std::string shortest(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, end) : std::to_string(v);
}

template <typename T>
T& need(const std::shared_ptr<T>& client, const char* tool) {
    if (!client) throw ProviderError(std::string(tool) + ": no client configured");
    return *client;
}

std::string relative_to(const std::filesystem::path& p, const std::filesystem::path& base) {
    auto rel = p.lexically_proximate(base);
    return rel.generic_string();
}

} // namespace

ToolRegistry make_builtin_registry(const ToolEnvironment& env) {
    ToolRegistry reg;
    const auto base = env.base_dir;

    reg.add(std::make_shared<FunctionTool>(
        ToolSpec{"calculator",
                 "Exact arithmetic on two numbers: add, sub, mul or div.",
                 {{"op", {"string", "One of add, sub, mul, div.", true}},
                  {"a", {"number", "Left operand.", true}},
                  {"b", {"number", "Right operand.", true}}}},
        [](const json& args) {
            const auto op = args.at("op").get<std::string>();
            const double a = args.at("a").get<double>();
            const double b = args.at("b").get<double>();
            const double v = calculator(calc_op_from_string(op), a, b);
            static const std::map<std::string, std::string> symbol{{"add", "+"}, {"sub", "-"}, {"mul", "*"}, {"div", "/"}};
            const auto display = text::format_fixed(v, 2);
            return ToolOutput{{{"op", op}, {"a", a}, {"b", b}, {"value", v}, {"display", display}},
                              shortest(a) + " " + symbol.at(op) + " " + shortest(b) + " = " + display};
        }));

    reg.add(std::make_shared<FunctionTool>(
        ToolSpec{"web_search",
                 "Search the web and return up to a handful of pages with extracted text.",
                 {{"query", {"string", "Search query.", true}}}},
        [env](const json& args) {
            const auto q = args.at("query").get<std::string>();
            auto results = web_search(q, need(env.web_search, "web_search"), env.web_max_results);
            json items = json::array();
            std::vector<std::string> titles;
            for (const auto& r : results) {
                items.push_back({{"title", r.title}, {"url", r.url}, {"extracted_text", r.extracted_text}});
                titles.push_back(r.title);
            }
            auto summary = std::to_string(results.size()) + " web results for '" + q + "'";
            if (!titles.empty()) summary += ": " + text::join(titles, "; ");
            return ToolOutput{{{"query", q}, {"results", items}}, summary};
        }));

    reg.add(std::make_shared<FunctionTool>(
        ToolSpec{"pubmed_search",
                 "Search PubMed; abstracts are indexed for this case only.",
                 {{"query", {"string", "PubMed query.", true}}}},
        [env](const json& args) {
            const auto q = args.at("query").get<std::string>();
            auto abstracts = need(env.pubmed, "pubmed_search").search(q, env.pubmed_max_results);
            json items = json::array();
            for (const auto& a : abstracts) items.push_back(to_json(a));
            return ToolOutput{{{"query", q}, {"abstracts", items}},
                              std::to_string(abstracts.size()) + " PubMed abstracts for '" + q + "'"};
        }));

    reg.add(std::make_shared<FunctionTool>(
        ToolSpec{"oncokb_lookup",
                 "Look up oncogenicity, evidence level and therapies for a gene alteration "
                 "(mutation, copy number alteration or fusion).",
                 {{"gene", {"string", "HUGO gene symbol.", true}},
                  {"alteration", {"string", "Alteration, e.g. V600E or ROS1 fusion.", true}}}},
        [env](const json& args) {
            auto rec = oncokb_lookup(args.at("gene").get<std::string>(), args.at("alteration").get<std::string>(),
                                     need(env.oncokb, "oncokb_lookup"));
            std::string summary = rec.gene + " " + rec.alteration + ": ";
            if (rec.status != "found") {
                summary += "not found";
            } else {
                summary += rec.oncogenicity + ", " + rec.evidence_level;
                if (!rec.therapies.empty()) summary += "; therapies: " + text::join(rec.therapies, ", ");
            }
            return ToolOutput{to_json(rec), summary};
        }));

    reg.add(std::make_shared<FunctionTool>(
        ToolSpec{"vision_report",
                 "Radiology report for one or more images; several images also get a comparison.",
                 {{"images", {"array", "Image references.", true}},
                  {"prompt", {"string", "What to report on.", true}},
                  {"labels", {"array", "Optional label per image.", false}}}},
        [env, base](const json& args) {
            std::vector<VisionImage> images;
            const auto labels = args.value("labels", json::array());
            for (std::size_t i = 0; i < args.at("images").size(); ++i) {
                const auto& ref = args.at("images").at(i);
                if (!ref.is_string()) throw ArgumentError("vision_report: image references must be strings");
                std::string label = i < labels.size() && labels[i].is_string() ? labels[i].get<std::string>() : "";
                images.push_back({fs::resolve(base, ref.get<std::string>()), label});
            }
            if (!env.vision) throw ProviderError("vision_report: no vision provider configured");
            auto r = vision_report(images, args.at("prompt").get<std::string>(), *env.vision, env.vision_options);
            return ToolOutput{{{"report", r.text}, {"per_image", r.per_image}, {"comparison", r.comparison}}, r.text};
        }));

    reg.add(std::make_shared<FunctionTool>(
        ToolSpec{"segment_area",
                 "Segment the lesion in an image from a point or box prompt and measure its area in pixels.",
                 {{"image", {"string", "Image reference.", true}},
                  {"prompt", {"object", "{\"point\": [x, y]} or {\"box\": [x0, y0, x1, y1]}.", true}}}},
        [env, base](const json& args) {
            const auto ref = args.at("image").get<std::string>();
            auto r = segment_area(fs::resolve(base, ref), segmentation_prompt_from_json(args.at("prompt")),
                                  need(env.segmentation, "segment_area"));
            const auto mask = relative_to(r.mask_ref, base);
            return ToolOutput{{{"image", ref}, {"mask_ref", mask}, {"area_pixels", r.area_pixels}},
                              "segmented area in " + ref + ": " + shortest(r.area_pixels) + " pixels"};
        }));

    reg.add(std::make_shared<FunctionTool>(
        ToolSpec{"histo_classify",
                 "Predict MSI, KRAS or BRAF status from precomputed histopathology features.",
                 {{"features", {"string", "Feature file reference.", true}},
                  {"target", {"string", "One of MSI, KRAS, BRAF.", true}}}},
        [env, base](const json& args) {
            auto r = histo_classify(fs::resolve(base, args.at("features").get<std::string>()),
                                    args.at("target").get<std::string>(), need(env.histology, "histo_classify"));
            return ToolOutput{{{"target", r.target}, {"label", r.label}, {"score", r.score}},
                              r.target + ": " + r.label + " (score " + text::format_fixed(r.score, 2) + ")"};
        }));

    return reg;
}

const std::map<std::string, std::vector<std::string>>& builtin_signatures() {
    static const std::map<std::string, std::vector<std::string>> sigs{
        {"calculator", {"a", "b", "op"}},
        {"web_search", {"query"}},
        {"pubmed_search", {"query"}},
        {"oncokb_lookup", {"alteration", "gene"}},
        {"vision_report", {"images", "prompt"}},
        {"segment_area", {"image", "prompt"}},
        {"histo_classify", {"features", "target"}},
    };
    return sigs;
}

std::vector<std::string> registry_self_test(const ToolRegistry& registry) {
    std::vector<std::string> problems;
    auto sample = [](const std::string& type) -> json {
        if (type == "string") return "x";
        if (type == "number") return 1.0;
        if (type == "integer") return 1;
        if (type == "boolean") return true;
        if (type == "array") return json::array();
        return json::object();
    };
    for (const auto& [name, expected] : builtin_signatures()) {
        const Tool* tool = registry.find(name);
        if (!tool) {
            problems.push_back(name + ": not registered");
            continue;
        }
        auto required = tool->spec().required();
        std::sort(required.begin(), required.end());
        if (required != expected) {
            problems.push_back(name + ": required parameters [" + text::join(required, ", ") +
                               "] differ from the operation signature [" + text::join(expected, ", ") + "]");
        }
        json full = json::object();
        for (const auto& [pname, p] : tool->spec().params) {
            if (p.required) full[pname] = sample(p.type);
        }
        try {
            tool->spec().check_args(full);
        } catch (const ArgumentError& e) {
            problems.push_back(name + ": rejects a complete argument set: " + e.what());
        }
        for (const auto& pname : required) {
            auto partial = full;
            partial.erase(pname);
            try {
                tool->spec().check_args(partial);
                problems.push_back(name + ": accepts a call without '" + pname + "'");
            } catch (const ArgumentError&) {
            }
        }
    }
    return problems;
}

} // namespace oncoagent::tools
