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

#include "oncoagent/agent/offline.hpp"

#include "oncoagent/agent/stages.hpp"
#include "oncoagent/common/error.hpp"
#include "oncoagent/common/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <set>

namespace oncoagent::agent {

using nlohmann::json;

namespace {

std::string var(const llm::ChatRequest& r, const std::string& name) {
    auto it = r.variables.find(name);
    return it == r.variables.end() ? std::string{} : it->second;
}

int int_var(const llm::ChatRequest& r, const std::string& name, int fallback) {
    try {
        return std::stoi(var(r, name));
    } catch (const std::exception&) {
        return fallback;
    }
}

std::string offline_plan(const llm::ChatRequest& r) {
    std::set<std::string> available;
    try {
        for (const auto& spec : json::parse(var(r, "tools"))) available.insert(spec.at("name").get<std::string>());
    } catch (const std::exception&) {
    }
    json attachments = json::array();
    try {
        attachments = json::parse(var(r, "attachments"));
    } catch (const std::exception&) {
    }

    json calls = json::array();
    auto add = [&](const std::string& id, const std::string& tool, json args) {
        if (available.count(tool)) calls.push_back({{"call_id", id}, {"tool", tool}, {"args", std::move(args)}});
    };

    std::vector<std::string> seg_ids;
    json images = json::array();
    json labels = json::array();
    for (const auto& a : attachments) {
        auto kind = a.value("kind", "");
        if (kind != "ct_image" && kind != "mri_image") continue;
        images.push_back(a.at("ref"));
        labels.push_back(a.value("label", a.at("ref").get<std::string>()));
        if (a.contains("prompt") && !a.at("prompt").is_null()) {
            seg_ids.push_back("seg" + std::to_string(seg_ids.size() + 1));
            add(seg_ids.back(), "segment_area", {{"image", a.at("ref")}, {"prompt", a.at("prompt")}});
        }
    }
    if (seg_ids.size() >= 2 && available.count("segment_area")) {
        add("ratio", "calculator",
            {{"op", "div"}, {"a", "$" + seg_ids.back() + ".area_pixels"}, {"b", "$" + seg_ids.front() + ".area_pixels"}});
    }
    if (!images.empty()) {
        add("vision", "vision_report", {{"images", images}, {"labels", labels}, {"prompt", var(r, "question")}});
    }
    int variants = 0;
    int slides = 0;
    for (const auto& a : attachments) {
        auto kind = a.value("kind", "");
        auto ref = a.value("ref", "");
        if (kind == "genomic_variant") {
            auto colon = ref.find(':');
            add("oncokb" + std::to_string(++variants), "oncokb_lookup",
                {{"gene", ref.substr(0, colon)}, {"alteration", colon == std::string::npos ? "" : ref.substr(colon + 1)}});
        } else if (kind == "histology_features") {
            add("histo" + std::to_string(++slides), "histo_classify", {{"features", ref}, {"target", "MSI"}});
        }
    }
    auto cap = static_cast<std::size_t>(std::max(0, int_var(r, "max_calls", 10)));
    if (calls.size() > cap) calls.erase(calls.begin() + static_cast<long>(cap), calls.end());
    return calls.dump(2);
}

std::string offline_subqueries(const llm::ChatRequest& r) {
    std::vector<std::string> lines{var(r, "question")};
    auto cap = static_cast<std::size_t>(std::max(1, int_var(r, "max_subqueries", 12)));
    for (const auto& line : text::split_lines(var(r, "tool_outputs"))) {
        auto ok = line.find(" (ok): ");
        if (ok == std::string::npos) continue;
        auto summary = text::trim(line.substr(ok + 7));
        if (!summary.empty()) lines.push_back(summary);
    }
    if (lines.size() > cap) lines.resize(cap);
    return text::join(lines, "\n");
}

std::string offline_response(const llm::ChatRequest& r) {
    auto count = int_var(r, "source_count", 0);
    if (count <= 0) return "No guideline sources were retrieved for this question.";
    // Sources are rendered as "Source i: text" blocks separated by blank lines.
    auto rendered = var(r, "sources");
    std::vector<std::string> out;
    for (int i = 1; i <= std::min(count, 3); ++i) {
        auto tag = "Source " + std::to_string(i) + ": ";
        auto at = rendered.find(tag);
        if (at == std::string::npos) continue;
        auto end = rendered.find("\n\nSource " + std::to_string(i + 1) + ": ", at);
        auto body = rendered.substr(at + tag.size(), end == std::string::npos ? std::string::npos : end - at - tag.size());
        auto sentences = split_sentences(body);
        if (sentences.empty()) continue;
        auto s = sentences.front();
        if (s.size() > 240) s = text::trim(s.substr(0, 240));
        while (!s.empty() && (s.back() == '.' || s.back() == ',' || s.back() == ';' || s.back() == ':')) s.pop_back();
        out.push_back(s + " [Source " + std::to_string(i) + "].");
    }
    if (out.empty()) return "No guideline sources were retrieved for this question.";
    return text::join(out, "\n");
}

std::set<std::string> content_words(const std::string& s) {
    std::set<std::string> words;
    std::string cur;
    for (char ch : text::to_lower(s) + " ") {
        if (std::isalnum(static_cast<unsigned char>(ch))) {
            cur += ch;
        } else {
            if (cur.size() >= 4) words.insert(cur);
            cur.clear();
        }
    }
    return words;
}

std::string offline_check(const llm::ChatRequest& r) {
    auto passage = content_words(var(r, "passage"));
    for (const auto& w : content_words(var(r, "statement"))) {
        if (passage.count(w)) return "supported";
    }
    return "unsupported";
}

} // namespace

std::string OfflineProvider::complete(const llm::ChatRequest& request) {
    const auto& id = request.template_id;
    if (id == kPlanTemplate) return offline_plan(request);
    if (id == "subqueries.v1") return offline_subqueries(request);
    if (id == kStrategyTemplate) {
        return "1. Review the patient context and tool findings\n"
               "2. Match the findings to the retrieved guideline sources\n"
               "3. Answer the question with cited statements";
    }
    if (is_generator_template(id)) return offline_response(request);
    if (id == kCitationCheckTemplate) return offline_check(request);
    if (id == kSuggestionsTemplate) return "Review the cited sources with the treating team before acting on this summary.";
    if (id == "vision_image.v1") return "No automated interpretation of " + var(request, "image_label") + " is available offline.";
    if (id == "vision_compare.v1") return "No automated comparison is available offline.";
    throw ProviderError("offline provider has no output for template " + id);
}

std::string FallbackProvider::complete(const llm::ChatRequest& request) {
    if (auto out = primary_->try_complete(request)) return *out;
    return fallback_->complete(request);
}

} // namespace oncoagent::agent
