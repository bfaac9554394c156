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

#include "oncoagent/llm/provider.hpp"

#include <memory>
#include <string>

namespace oncoagent::agent {

/// Deterministic stand-in for the language models when running offline.
/// Plans follow the case attachments (segmentation for prompted images, a
/// ratio for two or more areas, a vision report, OncoKB lookups and MSI
/// classification); responses quote the first sentence of the leading
/// sources; the checker accepts a citation when statement and passage share
/// a content word.
class OfflineProvider final : public llm::ChatProvider {
public:
    std::string complete(const llm::ChatRequest& request) override;
};

/// Uses the script where it has an answer and the fallback otherwise.
class FallbackProvider final : public llm::ChatProvider {
public:
    FallbackProvider(std::shared_ptr<llm::ScriptedProvider> primary, std::shared_ptr<llm::ChatProvider> fallback)
        : primary_(std::move(primary)), fallback_(std::move(fallback)) {}

    std::string complete(const llm::ChatRequest& request) override;

private:
    std::shared_ptr<llm::ScriptedProvider> primary_;
    std::shared_ptr<llm::ChatProvider> fallback_;
};

} // namespace oncoagent::agent
