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

#include "oncoagent/common/toml.hpp"

#include "oncoagent/common/error.hpp"

#include <cctype>
#include <charconv>
#include <string>
#include <vector>

namespace oncoagent::toml {

namespace {

using nlohmann::json;

class Reader {
public:
    explicit Reader(std::string_view text) : s_(text) {}

    json run() {
        json root = json::object();
        json* table = &root;
        while (true) {
            skip_blank_and_comments();
            if (eof()) break;
            if (peek() == '[') {
                table = &open_table(root);
            } else {
                auto keys = read_key_path();
                skip_inline_space();
                expect('=');
                skip_inline_space();
                json value = read_value();
                assign(*table, keys, std::move(value));
            }
            end_of_line();
        }
        return root;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;

    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return eof() ? '\0' : s_[pos_]; }

    char get() {
        char c = s_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("config line " + std::to_string(line_) + ": " + msg, line_,
                         ParseError::Unit::line);
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        get();
    }

    void skip_inline_space() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) get();
    }

    void skip_comment() {
        if (peek() == '#') {
            while (!eof() && peek() != '\n') get();
        }
    }

    void skip_blank_and_comments() {
        while (!eof()) {
            skip_inline_space();
            skip_comment();
            if (peek() == '\n' || peek() == '\r') {
                get();
            } else {
                break;
            }
        }
    }

    void end_of_line() {
        skip_inline_space();
        skip_comment();
        if (peek() == '\r') get();
        if (!eof() && peek() != '\n') fail("unexpected trailing characters");
    }

    std::string read_bare_or_quoted_key() {
        if (peek() == '"' || peek() == '\'') return read_string();
        std::string key;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                          peek() == '-')) {
            key += get();
        }
        if (key.empty()) fail("expected a key");
        return key;
    }

    std::vector<std::string> read_key_path() {
        std::vector<std::string> keys{read_bare_or_quoted_key()};
        skip_inline_space();
        while (peek() == '.') {
            get();
            skip_inline_space();
            keys.push_back(read_bare_or_quoted_key());
            skip_inline_space();
        }
        return keys;
    }

    json& open_table(json& root) {
        expect('[');
        if (peek() == '[') fail("arrays of tables are not supported");
        skip_inline_space();
        auto keys = read_key_path();
        expect(']');
        json* node = &root;
        for (const auto& k : keys) {
            json& child = (*node)[k];
            if (child.is_null()) child = json::object();
            if (!child.is_object()) fail("key '" + k + "' is not a table");
            node = &child;
        }
        return *node;
    }

    void assign(json& table, const std::vector<std::string>& keys, json value) {
        json* node = &table;
        for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
            json& child = (*node)[keys[i]];
            if (child.is_null()) child = json::object();
            if (!child.is_object()) fail("key '" + keys[i] + "' is not a table");
            node = &child;
        }
        if (node->contains(keys.back())) fail("duplicate key '" + keys.back() + "'");
        (*node)[keys.back()] = std::move(value);
    }

    std::string read_string() {
        char quote = get();
        if (peek() == quote && pos_ + 1 < s_.size() && s_[pos_ + 1] == quote) {
            fail("multi-line strings are not supported");
        }
        std::string out;
        while (true) {
            if (eof() || peek() == '\n') fail("unterminated string");
            char c = get();
            if (c == quote) break;
            if (c == '\\' && quote == '"') {
                if (eof()) fail("unterminated escape");
                char e = get();
                switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: fail(std::string("unsupported escape \\") + e);
                }
            } else {
                out += c;
            }
        }
        return out;
    }

    json read_array() {
        expect('[');
        json arr = json::array();
        while (true) {
            skip_blank_and_comments();
            if (peek() == ']') {
                get();
                return arr;
            }
            arr.push_back(read_value());
            skip_blank_and_comments();
            if (peek() == ',') {
                get();
            } else if (peek() == ']') {
                get();
                return arr;
            } else {
                fail("expected ',' or ']' in array");
            }
        }
    }

    json read_value() {
        char c = peek();
        if (c == '"' || c == '\'') return read_string();
        if (c == '[') return read_array();
        if (c == '{') fail("inline tables are not supported");

        std::string token;
        while (!eof() && peek() != ',' && peek() != ']' && peek() != '#' && peek() != '\n' &&
               peek() != ' ' && peek() != '\t' && peek() != '\r') {
            token += get();
        }
        if (token == "true") return true;
        if (token == "false") return false;
        std::string digits;
        for (char d : token) {
            if (d != '_') digits += d;
        }
        if (digits.empty()) fail("expected a value");
        const char* first = digits.data();
        if (*first == '+') ++first;
        const char* last = digits.data() + digits.size();
        bool is_float = digits.find_first_of(".eE") != std::string::npos;
        if (!is_float) {
            long long v = 0;
            auto [p, ec] = std::from_chars(first, last, v);
            if (ec == std::errc() && p == last) return v;
        } else {
            double v = 0;
            auto [p, ec] = std::from_chars(first, last, v);
            if (ec == std::errc() && p == last) return v;
        }
        fail("cannot parse value '" + token + "'");
    }
};

} // namespace

nlohmann::json parse(std::string_view text) {
    return Reader(text).run();
}

} // namespace oncoagent::toml
