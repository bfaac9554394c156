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

#include "oncoagent/corpus/xml.hpp"

#include "oncoagent/common/error.hpp"

#include <expat.h>

namespace oncoagent::xml {

namespace {

std::string local_name(const char* qname) {
    std::string_view s(qname);
    auto colon = s.rfind(':');
    return std::string(colon == std::string_view::npos ? s : s.substr(colon + 1));
}

struct Builder {
    std::unique_ptr<Element> root;
    std::vector<Element*> stack;

    static void on_start(void* data, const XML_Char* name, const XML_Char** atts) {
        auto* b = static_cast<Builder*>(data);
        auto el = std::make_unique<Element>();
        el->name = local_name(name);
        for (int i = 0; atts[i]; i += 2) el->attrs[atts[i]] = atts[i + 1];
        Element* raw = el.get();
        if (b->stack.empty()) {
            b->root = std::move(el);
        } else {
            b->stack.back()->children.emplace_back(std::move(el));
        }
        b->stack.push_back(raw);
    }

    static void on_end(void* data, const XML_Char*) { static_cast<Builder*>(data)->stack.pop_back(); }

    static void on_text(void* data, const XML_Char* s, int len) {
        auto* b = static_cast<Builder*>(data);
        if (b->stack.empty()) return;
        auto& kids = b->stack.back()->children;
        if (!kids.empty()) {
            if (auto* t = std::get_if<std::string>(&kids.back())) {
                t->append(s, static_cast<std::size_t>(len));
                return;
            }
        }
        kids.emplace_back(std::string(s, static_cast<std::size_t>(len)));
    }
};

void append_text(const Element& el, std::string& out) {
    for (const auto& c : el.children) {
        if (const auto* t = std::get_if<std::string>(&c)) {
            out += *t;
        } else {
            append_text(*std::get<std::unique_ptr<Element>>(c), out);
        }
    }
}

} // namespace

const Element* Element::child(std::string_view n) const {
    for (const auto& c : children) {
        if (auto* e = std::get_if<std::unique_ptr<Element>>(&c); e && (*e)->name == n) return e->get();
    }
    return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view n) const {
    std::vector<const Element*> out;
    for (const auto& c : children) {
        if (auto* e = std::get_if<std::unique_ptr<Element>>(&c); e && (*e)->name == n) out.push_back(e->get());
    }
    return out;
}

const Element* Element::find(std::string_view n) const {
    for (const auto& c : children) {
        if (auto* e = std::get_if<std::unique_ptr<Element>>(&c)) {
            if ((*e)->name == n) return e->get();
            if (const auto* hit = (*e)->find(n)) return hit;
        }
    }
    return nullptr;
}

std::string Element::attr(const std::string& key) const {
    auto it = attrs.find(key);
    return it == attrs.end() ? std::string() : it->second;
}

std::string Element::text() const {
    std::string out;
    append_text(*this, out);
    return out;
}

std::unique_ptr<Element> parse(std::string_view xml) {
    std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"),
                                                                                        &XML_ParserFree);
    if (!parser) throw Error("cannot allocate XML parser");
    Builder builder;
    XML_SetUserData(parser.get(), &builder);
    XML_SetElementHandler(parser.get(), &Builder::on_start, &Builder::on_end);
    XML_SetCharacterDataHandler(parser.get(), &Builder::on_text);
    if (XML_Parse(parser.get(), xml.data(), static_cast<int>(xml.size()), XML_TRUE) == XML_STATUS_ERROR) {
        auto offset = XML_GetCurrentByteIndex(parser.get());
        auto off = static_cast<std::size_t>(offset < 0 ? 0 : offset);
        throw ParseError("malformed XML at byte " + std::to_string(off) + ": " +
                             XML_ErrorString(XML_GetErrorCode(parser.get())),
                         off);
    }
    if (!builder.root) throw ParseError("XML document has no root element", 0);
    return std::move(builder.root);
}

} // namespace oncoagent::xml
