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

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace oncoagent::agent {

enum class AttachmentKind { ct_image, mri_image, histology_features, genomic_variant };

std::string to_string(AttachmentKind kind);
AttachmentKind attachment_kind_from_string(const std::string& s);

/// `ref` is a path relative to the case file, except for genomic variants
/// where it reads "GENE:ALTERATION". Image attachments may carry a
/// segmentation `prompt` ({point: [x, y]} or {box: [x0, y0, x1, y1]}).
struct Attachment {
    AttachmentKind kind = AttachmentKind::ct_image;
    std::string ref;
    std::string label;
    nlohmann::json prompt; // null when absent
    bool operator==(const Attachment&) const = default;
};

struct PatientCase {
    std::string case_id;
    std::string context;
    std::string question;
    std::vector<Attachment> attachments;
    bool operator==(const PatientCase&) const = default;
};

/// Throws ArgumentError when context or question is empty or an attachment
/// is malformed.
PatientCase case_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Attachment& a);
nlohmann::json to_json(const PatientCase& c);

PatientCase load_case(const std::filesystem::path& path);

/// Throws ArgumentError naming the first file attachment that does not
/// exist under `base_dir`.
void check_attachments(const PatientCase& c, const std::filesystem::path& base_dir);

} // namespace oncoagent::agent
