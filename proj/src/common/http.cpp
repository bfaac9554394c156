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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "oncoagent/common/http.hpp"

#include "oncoagent/common/error.hpp"

#include <cstdlib>
#include <openssl/evp.h>
#include <regex>

namespace oncoagent::http {

namespace {

struct ParsedUrl {
    std::string origin; // scheme://host[:port]
    std::string path;   // /path?query
};

ParsedUrl split_url(const std::string& url) {
    static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) throw ArgumentError("unsupported URL: " + url);
    return {m[1].str(), m[2].matched ? m[2].str() : std::string("/")};
}

} // namespace

HttplibTransport::HttplibTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

Response HttplibTransport::send(const Request& request) {
    auto [origin, path] = split_url(request.url);
    httplib::Client client(origin);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);

    httplib::Headers headers;
    std::string content_type = "application/json";
    for (const auto& [k, v] : request.headers) {
        if (k == "Content-Type") {
            content_type = v;
        } else {
            headers.emplace(k, v);
        }
    }

    httplib::Result res{nullptr, httplib::Error::Unknown};
    if (request.method == "GET") {
        res = client.Get(path, headers);
    } else if (request.method == "POST") {
        res = client.Post(path, headers, request.body, content_type);
    } else {
        throw ArgumentError("unsupported HTTP method " + request.method);
    }
    if (!res) {
        throw TransportError("request to " + origin + " failed: " + httplib::to_string(res.error()));
    }
    return {res->status, res->body};
}

Response RecordingTransport::send(const Request& request) {
    Handler handler;
    {
        std::lock_guard lock(mu_);
        requests_.push_back(request);
        handler = handler_;
    }
    if (!handler) throw TransportError("recording transport has no handler for " + request.url);
    return handler(request);
}

std::vector<Request> RecordingTransport::requests() const {
    std::lock_guard lock(mu_);
    return requests_;
}

std::size_t RecordingTransport::count() const {
    std::lock_guard lock(mu_);
    return requests_.size();
}

Response send_with_retries(Transport& transport, const Request& request, int attempts,
                           std::chrono::milliseconds backoff) {
    if (attempts < 1) attempts = 1;
    std::string last_error;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        try {
            auto response = transport.send(request);
            if (!response.retryable()) return response;
            last_error = "HTTP " + std::to_string(response.status);
        } catch (const TransportError& e) {
            last_error = e.what();
        }
        if (attempt < attempts) std::this_thread::sleep_for(backoff * attempt);
    }
    throw TransportError("giving up after " + std::to_string(attempts) + " attempts: " + last_error);
}

std::string base64_encode(const std::string& bytes) { return httplib::detail::base64_encode(bytes); }

std::string base64_decode(const std::string& encoded) {
    std::string in;
    for (char c : encoded) {
        if (!std::isspace(static_cast<unsigned char>(c))) in += c;
    }
    if (in.size() % 4 != 0) throw ParseError("base64 input length is not a multiple of 4", in.size());
    std::string out(in.size() / 4 * 3, '\0');
    int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                            reinterpret_cast<const unsigned char*>(in.data()), static_cast<int>(in.size()));
    if (n < 0) throw ParseError("malformed base64 input", 0);
    std::size_t padding = 0;
    if (!in.empty() && in.back() == '=') ++padding;
    if (in.size() > 1 && in[in.size() - 2] == '=') ++padding;
    out.resize(static_cast<std::size_t>(n) - padding);
    return out;
}

std::string url_encode(std::string_view s) {
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0xF];
        }
    }
    return out;
}

Request json_post(std::string url, std::string body, const std::string& api_key_env) {
    Request req;
    req.url = std::move(url);
    req.body = std::move(body);
    req.headers = {{"Content-Type", "application/json"}};
    const char* key = api_key_env.empty() ? nullptr : std::getenv(api_key_env.c_str());
    if (key && *key) req.headers.emplace_back("Authorization", std::string("Bearer ") + key);
    return req;
}

} // namespace oncoagent::http
