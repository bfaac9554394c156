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

#include <chrono>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace oncoagent::http {

struct Request {
    std::string method = "POST";
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
};

struct Response {
    int status = 0;
    std::string body;

    bool ok() const { return status >= 200 && status < 300; }
    /// 429 and 5xx are worth another attempt.
    bool retryable() const { return status == 429 || status >= 500; }
};

/// Every outbound network operation in the engine goes through this seam.
class Transport {
public:
    virtual ~Transport() = default;
    /// Throws TransportError when no response could be obtained.
    virtual Response send(const Request& request) = 0;
};

/// cpp-httplib backed transport (https via OpenSSL).
class HttplibTransport final : public Transport {
public:
    explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds(60));
    Response send(const Request& request) override;

private:
    std::chrono::seconds timeout_;
};

/// Test double: records every request and answers through a handler.
class RecordingTransport final : public Transport {
public:
    using Handler = std::function<Response(const Request&)>;

    RecordingTransport() = default;
    explicit RecordingTransport(Handler handler) : handler_(std::move(handler)) {}

    Response send(const Request& request) override;

    std::vector<Request> requests() const;
    std::size_t count() const;

private:
    mutable std::mutex mu_;
    Handler handler_;
    std::vector<Request> requests_;
};

/// Sends `request`, retrying transport failures and retryable statuses up
/// to `attempts` times in total. The final failure is rethrown as TransportError.
Response send_with_retries(Transport& transport, const Request& request, int attempts,
                           std::chrono::milliseconds backoff = std::chrono::milliseconds(200));

/// POST with a JSON content type and, when the named environment variable
/// is set, a bearer token.
Request json_post(std::string url, std::string body, const std::string& api_key_env);

std::string base64_encode(const std::string& bytes);
/// Throws ParseError on malformed input.
std::string base64_decode(const std::string& encoded);

/// Percent-encodes a query component.
std::string url_encode(std::string_view s);

} // namespace oncoagent::http
