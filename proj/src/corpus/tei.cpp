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

#include "oncoagent/corpus/tei.hpp"

#include "oncoagent/common/error.hpp"
#include "oncoagent/common/text.hpp"
#include "oncoagent/corpus/xml.hpp"

#include <cstdio>
#include <map>
#include <memory>
#include <variant>
#include <vector>

namespace oncoagent::corpus {

namespace {

using xml::Element;

bool is_dropped(const std::string& name) {
    return name == "figure" || name == "table" || name == "formula" || name == "ref" ||
           name == "note" || name == "listBibl" || name == "graphic";
}

void gather_text(const Element& el, std::string& out) {
    for (const auto& c : el.children) {
        if (const auto* t = std::get_if<std::string>(&c)) {
            out += *t;
        } else {
            const auto& e = *std::get<std::unique_ptr<Element>>(c);
            if (is_dropped(e.name)) continue;
            const bool block = e.name == "lb" || e.name == "p" || e.name == "item" || e.name == "head";
            if (block) out += ' ';
            gather_text(e, out);
            if (block) out += ' ';
        }
    }
}

std::string inline_text(const Element& el) {
    std::string raw;
    gather_text(el, raw);
    return text::collapse_whitespace(raw);
}

void find_all(const Element& el, std::string_view name, std::vector<const Element*>& out) {
    for (const auto& c : el.children) {
        if (const auto* e = std::get_if<std::unique_ptr<Element>>(&c)) {
            if ((*e)->name == name) out.push_back(e->get());
            find_all(**e, name, out);
        }
    }
}

const Element* find_first(const Element& el, std::string_view name) {
    std::vector<const Element*> all;
    find_all(el, name, all);
    return all.empty() ? nullptr : all.front();
}

std::string person_name(const Element& author) {
    const Element* pers = find_first(author, "persName");
    if (!pers) return inline_text(author);
    std::vector<std::string> parts;
    std::vector<const Element*> forenames;
    find_all(*pers, "forename", forenames);
    for (const auto* f : forenames) parts.push_back(inline_text(*f));
    if (const auto* sur = find_first(*pers, "surname")) parts.push_back(inline_text(*sur));
    if (parts.empty()) return inline_text(*pers);
    return text::collapse_whitespace(text::join(parts, " "));
}

std::optional<std::string> iso_date_of(const Element& date) {
    for (const auto& candidate : {date.attr("when"), inline_text(date)}) {
        // Accept a leading ISO date and ignore any time component.
        std::string head = candidate.substr(0, std::min<std::size_t>(candidate.size(), 10));
        for (std::size_t len : {std::size_t{10}, std::size_t{7}, std::size_t{4}}) {
            if (head.size() >= len && is_iso_date(head.substr(0, len))) return head.substr(0, len);
        }
    }
    return std::nullopt;
}

void read_header(const Element& header, SourceDocument& doc) {
    if (const auto* title_stmt = find_first(header, "titleStmt")) {
        if (const auto* title = find_first(*title_stmt, "title")) doc.title = inline_text(*title);
    }

    std::vector<const Element*> authors;
    if (const auto* source_desc = find_first(header, "sourceDesc")) find_all(*source_desc, "author", authors);
    if (authors.empty()) {
        if (const auto* title_stmt = find_first(header, "titleStmt")) find_all(*title_stmt, "author", authors);
    }
    for (const auto* a : authors) {
        auto name = person_name(*a);
        if (!name.empty()) doc.authors.push_back(std::move(name));
    }

    std::vector<const Element*> dates;
    if (const auto* pub = find_first(header, "publicationStmt")) find_all(*pub, "date", dates);
    if (dates.empty()) find_all(header, "date", dates);
    for (const auto* d : dates) {
        if (auto iso = iso_date_of(*d)) {
            doc.published = std::move(iso);
            break;
        }
    }

    std::vector<const Element*> ptrs;
    find_all(header, "ptr", ptrs);
    for (const auto* p : ptrs) {
        if (auto target = p->attr("target"); !target.empty()) {
            doc.url = target;
            break;
        }
    }
    if (!doc.url) {
        std::vector<const Element*> idnos;
        find_all(header, "idno", idnos);
        for (const auto* i : idnos) {
            auto type = text::to_lower(i->attr("type"));
            if (type == "url") {
                doc.url = inline_text(*i);
                break;
            }
        }
    }
}

void read_division(const Element& div, int level, std::vector<Section>& out) {
    Section section;
    section.level = level;
    if (const auto* head = div.child("head")) section.heading = inline_text(*head);
    std::size_t index = out.size();
    out.push_back(section);

    auto add_paragraph = [&](const Element& el) {
        auto p = inline_text(el);
        if (!p.empty()) out[index].paragraphs.push_back(std::move(p));
    };

    for (const auto& c : div.children) {
        const auto* ep = std::get_if<std::unique_ptr<Element>>(&c);
        if (!ep) continue;
        const Element& e = **ep;
        if (e.name == "p") {
            add_paragraph(e);
        } else if (e.name == "list") {
            std::vector<const Element*> items;
            find_all(e, "item", items);
            for (const auto* item : items) add_paragraph(*item);
        } else if (e.name == "div") {
            read_division(e, level + 1, out);
        }
    }
}

} // namespace

SourceDocument parse_tei(std::string_view xml, std::string_view fallback_id, Source source) {
    auto root = oncoagent::xml::parse(xml);

    SourceDocument doc;
    doc.source = source;
    doc.id = root->attr("xml:id");
    if (doc.id.empty()) doc.id = std::string(fallback_id);
    if (doc.id.empty()) {
        char buf[24];
        std::snprintf(buf, sizeof buf, "tei-%016llx",
                      static_cast<unsigned long long>(text::fnv1a64(xml)));
        doc.id = buf;
    }

    if (const auto* header = find_first(*root, "teiHeader")) read_header(*header, doc);

    const Element* body = find_first(*root, "body");
    if (!body) throw EmptyDocumentError("TEI document " + doc.id + " has no body");

    Section loose{1, "", {}};
    for (const auto& c : body->children) {
        const auto* ep = std::get_if<std::unique_ptr<Element>>(&c);
        if (!ep) continue;
        const Element& e = **ep;
        if (e.name == "div") {
            read_division(e, 1, doc.sections);
        } else if (e.name == "p") {
            auto p = inline_text(e);
            if (!p.empty()) loose.paragraphs.push_back(std::move(p));
        }
    }
    if (!loose.paragraphs.empty()) doc.sections.insert(doc.sections.begin(), std::move(loose));
    return doc;
}

} // namespace oncoagent::corpus
