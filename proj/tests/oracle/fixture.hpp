// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tailrank Authors

// The bundled two-entity corpus, loaded both into library stores and as raw
// records for the oracle.

#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "tailrank/datamodel.hpp"
#include "tailrank/embeddings.hpp"
#include "tailrank/pipeline.hpp"

namespace fixture {

inline std::string path(const std::string& name) {
    return std::string(TAILRANK_FIXTURE_DIR) + "/" + name;
}

template <typename Parse>
auto read(const std::string& name, Parse parse) {
    std::ifstream in(path(name));
    return parse(in, name);
}

struct Fixture {
    std::vector<tailrank::CatalogEntity> catalog_records =
        read("catalog.jsonl", tailrank::parse_catalog_records);
    std::vector<tailrank::Context> context_records =
        read("contexts.jsonl", tailrank::parse_context_records);
    std::vector<tailrank::LinkAnnotation> annotation_records =
        read("annotations.jsonl", tailrank::parse_annotation_records);
    std::vector<tailrank::EntityQuery> entities = tailrank::load_entities(path("entities.jsonl"));
    tailrank::EmbeddingTable embeddings = tailrank::load_embeddings(path("embeddings.txt"));

    tailrank::Catalog catalog{catalog_records};
    tailrank::InvertedIndex catalog_index = tailrank::build_catalog_index(catalog);
    tailrank::ContextStore contexts{context_records};
    tailrank::AnnotationStore annotations{annotation_records, 0.9};

    tailrank::Stores stores() const {
        return {catalog, catalog_index, contexts, annotations, &embeddings};
    }

    oracle::Corpus corpus() const {
        return {catalog_records, context_records, annotation_records, &embeddings};
    }

    const tailrank::EntityQuery& entity(const std::string& id) const {
        for (const auto& e : entities)
            if (e.id == id) return e;
        throw std::out_of_range(id);
    }

    static std::vector<std::string> ids(const tailrank::ContextSet& set) {
        std::vector<std::string> out;
        for (const auto* c : set.members) out.push_back(c->context_id);
        return out;
    }
};

}  // namespace fixture
