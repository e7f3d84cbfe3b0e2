// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tailrank Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tailrank {

enum class EntityType { Person, Location, Organization };

std::string_view to_string(EntityType type);
std::optional<EntityType> parse_entity_type(std::string_view label);

/// The long-tail entity whose contexts are being ranked.
struct EntityQuery {
    std::string id;
    std::string description;
    EntityType entity_type = EntityType::Organization;
    std::vector<std::string> surface_forms;
};

/// A well-represented entity from the reference catalog.
struct CatalogEntity {
    std::string id;
    std::string opening_text;
    std::vector<std::string> types;
    std::uint64_t inlink_count = 0;
    std::vector<std::string> surface_forms;
};

/// A detected mention. Offsets are Unicode code point offsets into the context text.
struct Mention {
    std::size_t start = 0;
    std::size_t end = 0;
    std::string surface;
};

struct Context {
    std::string context_id;
    std::string text;
    std::string source_doc;
    std::vector<Mention> mentions;
};

struct LinkAnnotation {
    std::string context_id;
    std::string entity_id;
    double confidence = 0.0;
};

/// Case-folded, NFC-normalized form with internal whitespace collapsed to a
/// single space and no leading or trailing whitespace.
std::string normalize_surface(std::string_view surface);

/// Returns the UTF-8 substring covering code points [start, end), or nullopt
/// if the range does not fit in `text`.
std::optional<std::string_view> code_point_slice(std::string_view text, std::size_t start,
                                                 std::size_t end);

class Catalog {
public:
    Catalog() = default;
    explicit Catalog(std::vector<CatalogEntity> entities);

    Catalog(const Catalog&) = delete;
    Catalog& operator=(const Catalog&) = delete;
    Catalog(Catalog&&) noexcept = default;
    Catalog& operator=(Catalog&&) noexcept = default;

    const CatalogEntity* find(std::string_view id) const;
    /// Entities in ascending id order.
    std::span<const CatalogEntity> entities() const { return entities_; }
    std::size_t size() const { return entities_.size(); }
    bool empty() const { return entities_.empty(); }

private:
    std::vector<CatalogEntity> entities_;
    std::unordered_map<std::string_view, std::size_t> by_id_;
};

class ContextStore {
public:
    ContextStore() = default;
    explicit ContextStore(std::vector<Context> contexts);

    ContextStore(const ContextStore&) = delete;
    ContextStore& operator=(const ContextStore&) = delete;
    ContextStore(ContextStore&&) noexcept = default;
    ContextStore& operator=(ContextStore&&) noexcept = default;

    const Context* find(std::string_view context_id) const;
    /// Contexts in ascending context_id order.
    std::span<const Context> contexts() const { return contexts_; }
    std::size_t size() const { return contexts_.size(); }

    /// Positions (into contexts()) of contexts having a mention whose
    /// normalized surface equals `normalized_surface`; ascending.
    std::span<const std::size_t> with_surface(const std::string& normalized_surface) const;

private:
    std::vector<Context> contexts_;
    std::unordered_map<std::string_view, std::size_t> by_id_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_surface_;
};

/// Link annotations retained at or above a confidence threshold.
///
/// Duplicate (context, entity) pairs keep the maximum confidence. Lookups by
/// entity return contexts in descending confidence, ties by ascending context id.
class AnnotationStore {
public:
    AnnotationStore() = default;
    AnnotationStore(std::vector<LinkAnnotation> annotations, double theta);

    AnnotationStore(const AnnotationStore&) = delete;
    AnnotationStore& operator=(const AnnotationStore&) = delete;
    AnnotationStore(AnnotationStore&&) noexcept = default;
    AnnotationStore& operator=(AnnotationStore&&) noexcept = default;

    double theta() const { return theta_; }
    std::size_t size() const { return annotations_.size(); }

    /// All retained annotations, sorted by (entity_id, -confidence, context_id).
    std::span<const LinkAnnotation> annotations() const { return annotations_; }
    /// The collection of contexts linked to `entity_id`.
    std::span<const LinkAnnotation> linked_contexts(std::string_view entity_id) const;
    /// Every retained annotation on `context_id`, ascending entity id.
    std::vector<const LinkAnnotation*> annotations_on(std::string_view context_id) const;
    bool has_entity(std::string_view entity_id) const;

private:
    double theta_ = 0.0;
    std::vector<LinkAnnotation> annotations_;
    std::unordered_map<std::string_view, std::pair<std::size_t, std::size_t>> by_entity_;
    std::unordered_map<std::string_view, std::vector<std::size_t>> by_context_;
};

/// Candidate contexts C for one long-tail entity. Members point into the
/// ContextStore they were gathered from, which must outlive the set.
struct ContextSet {
    std::string entity_id;
    std::vector<const Context*> members;
    /// Number of matches dropped by the cap.
    std::size_t truncated = 0;

    std::size_t size() const { return members.size(); }
    bool empty() const { return members.empty(); }
};

inline constexpr std::size_t kDefaultCandidateCap = 5000;

/// Every context mentioning a surface form of `entity`, ascending context id,
/// limited to the first `cap` matches.
ContextSet gather_candidate_contexts(const EntityQuery& entity, const ContextStore& store,
                                     std::size_t cap = kDefaultCandidateCap);

// Line-delimited JSON record I/O. `source` names the stream in error messages.

std::vector<CatalogEntity> parse_catalog_records(std::istream& in, const std::string& source);
std::vector<Context> parse_context_records(std::istream& in, const std::string& source);
std::vector<LinkAnnotation> parse_annotation_records(std::istream& in, const std::string& source);
std::vector<EntityQuery> parse_entity_records(std::istream& in, const std::string& source);

Catalog load_catalog(const std::filesystem::path& path);
ContextStore load_contexts(const std::filesystem::path& path);
AnnotationStore load_annotations(const std::filesystem::path& path, double theta);
std::vector<EntityQuery> load_entities(const std::filesystem::path& path);

void write_records(std::ostream& out, std::span<const CatalogEntity> records);
void write_records(std::ostream& out, std::span<const Context> records);
void write_records(std::ostream& out, std::span<const LinkAnnotation> records);
void write_records(std::ostream& out, std::span<const EntityQuery> records);

}  // namespace tailrank
