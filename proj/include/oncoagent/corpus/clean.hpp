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

#include <string>
#include <string_view>

namespace oncoagent::corpus {

/// Removes URLs (`scheme://...`, `www....`) and dotted-quad IPv4 shapes,
/// drops control characters other than newline along with invalid UTF-8,
/// and collapses horizontal whitespace runs to one space. Newlines are kept;
/// spaces next to a newline and at either end are trimmed. Idempotent.
std::string clean_text(std::string_view raw);

} // namespace oncoagent::corpus
