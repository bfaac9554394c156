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

#include "oncoagent/corpus/document.hpp"

#include <string_view>

namespace oncoagent::corpus {

/// Reads the TEI subset emitted by GROBID-style converters: header title,
/// authors, date and URL plus body divisions (`div`/`head`/`p`). Nested
/// divisions get level + 1. Figures, tables, formulas and `ref` elements
/// are dropped.
///
/// The document id comes from the root `xml:id`, else `fallback_id`, else
/// a content hash. Throws ParseError (byte offset) on malformed XML and
/// EmptyDocumentError when there is no `body`.
SourceDocument parse_tei(std::string_view xml, std::string_view fallback_id = {},
                         Source source = Source::custom);

} // namespace oncoagent::corpus
