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

#include "oncoagent/agent/case.hpp"

#include "oncoagent/common/error.hpp"
#include "oncoagent/common/fs.hpp"
#include "oncoagent/common/text.hpp"

namespace oncoagent::agent {

using nlohmann::json;

std::string to_string(AttachmentKind kind) {
    switch (kind) {
    case AttachmentKind::ct_image: return "ct_image";
    case AttachmentKind::mri_image: return "mri_image";
    case AttachmentKind::histology_features: return "histology_features";
    case AttachmentKind::genomic_variant: return "genomic_variant";
    }
    return "ct_image";
}

AttachmentKind attachment_kind_from_string(const std::string& s) {
    if (s == "ct_image") return AttachmentKind::ct_image;
    if (s == "mri_image") return AttachmentKind::mri_image;
    if (s == "histology_features") return AttachmentKind::histology_features;
    if (s == "genomic_variant") return AttachmentKind::genomic_variant;
    throw ArgumentError("unknown attachment kind: " + s);
}

PatientCase case_from_json(const json& j) {
    if (!j.is_object()) throw ArgumentError("case must be a JSON object");
    PatientCase c;
    c.case_id = j.value("case_id", "");
    c.context = j.value("context", "");
    c.question = j.value("question", "");
    if (text::trim(c.context).empty()) throw ArgumentError("case " + c.case_id + ": context is empty");
    if (text::trim(c.question).empty()) throw ArgumentError("case " + c.case_id + ": question is empty");
    for (const auto& raw : j.value("attachments", json::array())) {
        Attachment a;
        a.kind = attachment_kind_from_string(raw.at("kind").get<std::string>());
        a.ref = raw.at("ref").get<std::string>();
        a.label = raw.value("label", a.ref);
        if (raw.contains("prompt")) a.prompt = raw.at("prompt");
        if (a.ref.empty()) throw ArgumentError("case " + c.case_id + ": attachment without ref");
        if (a.kind == AttachmentKind::genomic_variant && a.ref.find(':') == std::string::npos) {
            throw ArgumentError("genomic variant ref must read GENE:ALTERATION, got " + a.ref);
        }
        c.attachments.push_back(std::move(a));
    }
    return c;
}

json to_json(const Attachment& a) {
    json j{{"kind", to_string(a.kind)}, {"ref", a.ref}, {"label", a.label}};
    if (!a.prompt.is_null()) j["prompt"] = a.prompt;
    return j;
}

json to_json(const PatientCase& c) {
    json atts = json::array();
    for (const auto& a : c.attachments) atts.push_back(to_json(a));
    return {{"case_id", c.case_id}, {"context", c.context}, {"question", c.question}, {"attachments", atts}};
}

PatientCase load_case(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(fs::read_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what(), e.byte);
    }
    return case_from_json(j);
}

void check_attachments(const PatientCase& c, const std::filesystem::path& base_dir) {
    for (const auto& a : c.attachments) {
        if (a.kind == AttachmentKind::genomic_variant) continue;
        if (!std::filesystem::exists(fs::resolve(base_dir, a.ref))) {
            throw ArgumentError("attachment " + a.label + " not found: " + a.ref);
        }
    }
}

} // namespace oncoagent::agent
