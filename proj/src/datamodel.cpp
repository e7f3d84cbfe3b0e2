// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tailrank Authors

#include "tailrank/datamodel.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include <json.hpp>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "tailrank/errors.hpp"

namespace tailrank {

using nlohmann::json;

std::string_view to_string(EntityType type) {
    switch (type) {
        case EntityType::Person: return "Person";
        case EntityType::Location: return "Location";
        case EntityType::Organization: return "Organization";
    }
    return "Organization";
}

std::optional<EntityType> parse_entity_type(std::string_view label) {
    if (label == "Person") return EntityType::Person;
    if (label == "Location") return EntityType::Location;
    if (label == "Organization") return EntityType::Organization;
    return std::nullopt;
}

std::string normalize_surface(std::string_view surface) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");

    icu::UnicodeString text = icu::UnicodeString::fromUTF8(
        icu::StringPiece(surface.data(), static_cast<int32_t>(surface.size())));
    icu::UnicodeString folded = nfc->normalize(text, status);
    folded.foldCase();
    // Case folding can produce sequences that are no longer in NFC.
    folded = nfc->normalize(folded, status);
    if (U_FAILURE(status)) throw Error("ICU normalization failed");

    icu::UnicodeString collapsed;
    bool pending_space = false;
    for (int32_t i = 0; i < folded.length();) {
        const UChar32 cp = folded.char32At(i);
        i += U16_LENGTH(cp);
        if (u_isUWhiteSpace(cp)) {
            pending_space = !collapsed.isEmpty();
            continue;
        }
        if (pending_space) collapsed.append(static_cast<UChar>(u' '));
        pending_space = false;
        collapsed.append(cp);
    }
    std::string out;
    collapsed.toUTF8String(out);
    return out;
}

std::optional<std::string_view> code_point_slice(std::string_view text, std::size_t start,
                                                 std::size_t end) {
    if (start > end) return std::nullopt;
    const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
    const auto length = static_cast<int32_t>(text.size());
    int32_t offset = 0;
    std::size_t index = 0;
    std::size_t byte_start = 0;
    std::optional<std::size_t> byte_end;
    while (true) {
        if (index == start) byte_start = static_cast<std::size_t>(offset);
        if (index == end) {
            byte_end = static_cast<std::size_t>(offset);
            break;
        }
        if (offset >= length) break;
        UChar32 cp;
        U8_NEXT(bytes, offset, length, cp);
        if (cp < 0) return std::nullopt;
        ++index;
    }
    if (!byte_end) return std::nullopt;
    return text.substr(byte_start, *byte_end - byte_start);
}

// ---------------------------------------------------------------------------
// Stores

Catalog::Catalog(std::vector<CatalogEntity> entities) : entities_(std::move(entities)) {
    std::sort(entities_.begin(), entities_.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    by_id_.reserve(entities_.size());
    for (std::size_t i = 0; i < entities_.size(); ++i) {
        if (entities_[i].id.empty()) throw IntegrityError("catalog entity with empty id");
        if (!by_id_.emplace(entities_[i].id, i).second)
            throw IntegrityError("duplicate catalog entity id '" + entities_[i].id + "'");
    }
}

const CatalogEntity* Catalog::find(std::string_view id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &entities_[it->second];
}

ContextStore::ContextStore(std::vector<Context> contexts) : contexts_(std::move(contexts)) {
    std::sort(contexts_.begin(), contexts_.end(),
              [](const auto& a, const auto& b) { return a.context_id < b.context_id; });
    by_id_.reserve(contexts_.size());
    for (std::size_t i = 0; i < contexts_.size(); ++i) {
        const Context& ctx = contexts_[i];
        if (ctx.context_id.empty()) throw IntegrityError("context with empty context_id");
        if (!by_id_.emplace(ctx.context_id, i).second)
            throw IntegrityError("duplicate context_id '" + ctx.context_id + "'");
        std::set<std::string> surfaces;
        for (const Mention& m : ctx.mentions) {
            auto span = code_point_slice(ctx.text, m.start, m.end);
            if (!span || m.start >= m.end)
                throw IntegrityError("context '" + ctx.context_id + "': mention span [" +
                                     std::to_string(m.start) + "," + std::to_string(m.end) +
                                     ") outside text");
            if (*span != m.surface)
                throw IntegrityError("context '" + ctx.context_id + "': mention surface '" +
                                     m.surface + "' does not match text '" +
                                     std::string(*span) + "'");
            surfaces.insert(normalize_surface(m.surface));
        }
        for (const auto& s : surfaces) by_surface_[s].push_back(i);
    }
}

const Context* ContextStore::find(std::string_view context_id) const {
    auto it = by_id_.find(context_id);
    return it == by_id_.end() ? nullptr : &contexts_[it->second];
}

std::span<const std::size_t> ContextStore::with_surface(
    const std::string& normalized_surface) const {
    auto it = by_surface_.find(normalized_surface);
    if (it == by_surface_.end()) return {};
    return it->second;
}

AnnotationStore::AnnotationStore(std::vector<LinkAnnotation> annotations, double theta)
    : theta_(theta) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw UsageError("annotation threshold must be in [0,1], got " + std::to_string(theta));

    std::erase_if(annotations, [theta](const auto& a) { return a.confidence < theta; });
    // Keep the maximum confidence per (context, entity) pair.
    std::sort(annotations.begin(), annotations.end(), [](const auto& a, const auto& b) {
        if (a.entity_id != b.entity_id) return a.entity_id < b.entity_id;
        if (a.context_id != b.context_id) return a.context_id < b.context_id;
        return a.confidence > b.confidence;
    });
    annotations.erase(std::unique(annotations.begin(), annotations.end(),
                                  [](const auto& a, const auto& b) {
                                      return a.entity_id == b.entity_id &&
                                             a.context_id == b.context_id;
                                  }),
                      annotations.end());
    std::sort(annotations.begin(), annotations.end(), [](const auto& a, const auto& b) {
        if (a.entity_id != b.entity_id) return a.entity_id < b.entity_id;
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        return a.context_id < b.context_id;
    });
    annotations_ = std::move(annotations);

    for (std::size_t i = 0; i < annotations_.size();) {
        std::size_t j = i;
        while (j < annotations_.size() && annotations_[j].entity_id == annotations_[i].entity_id)
            ++j;
        by_entity_.emplace(annotations_[i].entity_id, std::make_pair(i, j));
        i = j;
    }
    // Entity-major order makes each per-context list ascend by entity id.
    for (std::size_t i = 0; i < annotations_.size(); ++i)
        by_context_[annotations_[i].context_id].push_back(i);
}

std::span<const LinkAnnotation> AnnotationStore::linked_contexts(
    std::string_view entity_id) const {
    auto it = by_entity_.find(entity_id);
    if (it == by_entity_.end()) return {};
    const auto [first, last] = it->second;
    return std::span<const LinkAnnotation>(annotations_).subspan(first, last - first);
}

std::vector<const LinkAnnotation*> AnnotationStore::annotations_on(
    std::string_view context_id) const {
    std::vector<const LinkAnnotation*> out;
    if (auto it = by_context_.find(context_id); it != by_context_.end()) {
        out.reserve(it->second.size());
        for (std::size_t i : it->second) out.push_back(&annotations_[i]);
    }
    return out;
}

bool AnnotationStore::has_entity(std::string_view entity_id) const {
    return by_entity_.contains(entity_id);
}

ContextSet gather_candidate_contexts(const EntityQuery& entity, const ContextStore& store,
                                     std::size_t cap) {
    std::set<std::size_t> positions;
    for (const auto& form : entity.surface_forms) {
        auto matches = store.with_surface(normalize_surface(form));
        positions.insert(matches.begin(), matches.end());
    }
    ContextSet set;
    set.entity_id = entity.id;
    const auto all = store.contexts();
    for (std::size_t pos : positions) {
        if (set.members.size() == cap) {
            ++set.truncated;
            continue;
        }
        set.members.push_back(&all[pos]);
    }
    return set;
}

// ---------------------------------------------------------------------------
// Record parsing

namespace {

template <typename T>
T field(const json& obj, const char* name, const std::string& source, std::size_t line) {
    auto it = obj.find(name);
    if (it == obj.end()) throw ParseError(source, line, std::string("missing field '") + name + "'");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ParseError(source, line, std::string("field '") + name + "' has the wrong type");
    }
}

template <typename Fn>
void for_each_record(std::istream& in, const std::string& source, Fn&& fn) {
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(source, number, std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object()) throw ParseError(source, number, "record is not a JSON object");
        fn(obj, number);
    }
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path.string() + "'");
    return in;
}

}  // namespace

std::vector<CatalogEntity> parse_catalog_records(std::istream& in, const std::string& source) {
    std::vector<CatalogEntity> out;
    for_each_record(in, source, [&](const json& obj, std::size_t line) {
        CatalogEntity e;
        e.id = field<std::string>(obj, "id", source, line);
        e.opening_text = field<std::string>(obj, "opening_text", source, line);
        e.types = field<std::vector<std::string>>(obj, "types", source, line);
        const auto inlinks = field<json>(obj, "inlink_count", source, line);
        if (!inlinks.is_number_integer() || inlinks.get<std::int64_t>() < 0)
            throw ParseError(source, line, "inlink_count must be a non-negative integer");
        e.inlink_count = inlinks.get<std::uint64_t>();
        e.surface_forms = field<std::vector<std::string>>(obj, "surface_forms", source, line);
        out.push_back(std::move(e));
    });
    return out;
}

std::vector<Context> parse_context_records(std::istream& in, const std::string& source) {
    std::vector<Context> out;
    for_each_record(in, source, [&](const json& obj, std::size_t line) {
        Context c;
        c.context_id = field<std::string>(obj, "context_id", source, line);
        c.text = field<std::string>(obj, "text", source, line);
        c.source_doc = field<std::string>(obj, "source_doc", source, line);
        for (const auto& m : field<json>(obj, "mentions", source, line)) {
            if (!m.is_object()) throw ParseError(source, line, "mention is not an object");
            Mention mention;
            const auto start = field<std::int64_t>(m, "char_start", source, line);
            const auto end = field<std::int64_t>(m, "char_end", source, line);
            if (start < 0 || end <= start)
                throw ParseError(source, line, "mention span must satisfy 0 <= start < end");
            mention.start = static_cast<std::size_t>(start);
            mention.end = static_cast<std::size_t>(end);
            mention.surface = field<std::string>(m, "surface_string", source, line);
            auto span = code_point_slice(c.text, mention.start, mention.end);
            if (!span) throw ParseError(source, line, "mention span exceeds text length");
            if (*span != mention.surface)
                throw IntegrityError(source + ":" + std::to_string(line) + ": mention surface '" +
                                     mention.surface + "' does not match text '" +
                                     std::string(*span) + "'");
            c.mentions.push_back(std::move(mention));
        }
        out.push_back(std::move(c));
    });
    return out;
}

std::vector<LinkAnnotation> parse_annotation_records(std::istream& in,
                                                     const std::string& source) {
    std::vector<LinkAnnotation> out;
    for_each_record(in, source, [&](const json& obj, std::size_t line) {
        LinkAnnotation a;
        a.context_id = field<std::string>(obj, "context_id", source, line);
        a.entity_id = field<std::string>(obj, "entity_id", source, line);
        a.confidence = field<double>(obj, "confidence", source, line);
        if (!(a.confidence >= 0.0 && a.confidence <= 1.0))
            throw ParseError(source, line, "confidence must be in [0,1]");
        out.push_back(std::move(a));
    });
    return out;
}

std::vector<EntityQuery> parse_entity_records(std::istream& in, const std::string& source) {
    std::vector<EntityQuery> out;
    std::set<std::string> seen;
    for_each_record(in, source, [&](const json& obj, std::size_t line) {
        EntityQuery e;
        e.id = field<std::string>(obj, "id", source, line);
        e.description = field<std::string>(obj, "description", source, line);
        const auto type = field<std::string>(obj, "entity_type", source, line);
        auto parsed = parse_entity_type(type);
        if (!parsed)
            throw ParseError(source, line,
                             "entity_type must be Person, Location or Organization, got '" +
                                 type + "'");
        e.entity_type = *parsed;
        e.surface_forms = field<std::vector<std::string>>(obj, "surface_forms", source, line);
        if (e.id.empty()) throw ParseError(source, line, "entity id is empty");
        if (e.description.empty()) throw ParseError(source, line, "description is empty");
        if (e.surface_forms.empty()) throw ParseError(source, line, "surface_forms is empty");
        if (!seen.insert(e.id).second)
            throw IntegrityError(source + ":" + std::to_string(line) + ": duplicate entity id '" +
                                 e.id + "'");
        out.push_back(std::move(e));
    });
    return out;
}

Catalog load_catalog(const std::filesystem::path& path) {
    auto in = open_input(path);
    return Catalog(parse_catalog_records(in, path.string()));
}

ContextStore load_contexts(const std::filesystem::path& path) {
    auto in = open_input(path);
    return ContextStore(parse_context_records(in, path.string()));
}

AnnotationStore load_annotations(const std::filesystem::path& path, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw UsageError("annotation threshold must be in [0,1], got " + std::to_string(theta));
    auto in = open_input(path);
    return AnnotationStore(parse_annotation_records(in, path.string()), theta);
}

std::vector<EntityQuery> load_entities(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_entity_records(in, path.string());
}

// ---------------------------------------------------------------------------
// Record writing

void write_records(std::ostream& out, std::span<const CatalogEntity> records) {
    for (const auto& e : records) {
        json obj = {{"id", e.id},
                    {"opening_text", e.opening_text},
                    {"types", e.types},
                    {"inlink_count", e.inlink_count},
                    {"surface_forms", e.surface_forms}};
        out << obj.dump() << '\n';
    }
}

void write_records(std::ostream& out, std::span<const Context> records) {
    for (const auto& c : records) {
        json mentions = json::array();
        for (const auto& m : c.mentions)
            mentions.push_back(
                {{"char_start", m.start}, {"char_end", m.end}, {"surface_string", m.surface}});
        json obj = {{"context_id", c.context_id},
                    {"text", c.text},
                    {"source_doc", c.source_doc},
                    {"mentions", std::move(mentions)}};
        out << obj.dump() << '\n';
    }
}

void write_records(std::ostream& out, std::span<const LinkAnnotation> records) {
    for (const auto& a : records) {
        json obj = {
            {"context_id", a.context_id}, {"entity_id", a.entity_id}, {"confidence", a.confidence}};
        out << obj.dump() << '\n';
    }
}

void write_records(std::ostream& out, std::span<const EntityQuery> records) {
    for (const auto& e : records) {
        json obj = {{"id", e.id},
                    {"description", e.description},
                    {"entity_type", to_string(e.entity_type)},
                    {"surface_forms", e.surface_forms}};
        out << obj.dump() << '\n';
    }
}

}  // namespace tailrank
