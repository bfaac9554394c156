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

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace oncoagent::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// The `oncoagent` command line. Subcommands: corpus ingest|filter, index
/// build, agent run|replay, eval compute, tools list.
class App {
public:
    /// `transport` carries every network request of online runs; when null,
    /// an https transport is created on first use.
    explicit App(std::shared_ptr<http::Transport> transport = nullptr);
    App(std::shared_ptr<http::Transport> transport, std::ostream& out, std::ostream& err);

    /// `args` excludes the program name.
    int run(const std::vector<std::string>& args);
    int run(int argc, const char* const* argv);

private:
    http::Transport& transport();

    std::shared_ptr<http::Transport> transport_;
    std::ostream& out_;
    std::ostream& err_;
};

} // namespace oncoagent::cli
