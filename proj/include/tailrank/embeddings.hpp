// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tailrank Authors

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tailrank/textindex.hpp"

namespace tailrank {

/// Pretrained word vectors of a single dimension.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    explicit EmbeddingTable(std::size_t dimension) : dimension_(dimension) {}

    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return vectors_.size(); }

    /// Inserts or replaces. Throws UsageError on a dimension mismatch.
    void insert(std::string term, std::vector<double> vector);
    /// Empty span when the term is out of vocabulary.
    std::span<const double> lookup(std::string_view term) const;

    /// Non-fatal notes collected while loading (duplicate terms).
    const std::vector<std::string>& warnings() const { return warnings_; }

    /// Text format: optional "count dim" header, then "term v1 ... vd" per line.
    static EmbeddingTable parse(std::istream& in, const std::string& source);

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
    };

    std::size_t dimension_ = 0;
    std::unordered_map<std::string, std::vector<double>, Hash, std::equal_to<>> vectors_;
    std::vector<std::string> warnings_;
};

EmbeddingTable load_embeddings(const std::filesystem::path& path);

struct ContextVector {
    std::vector<double> values;
    std::size_t covered_terms = 0;
};

/// Mean of the vectors of in-vocabulary tokens, one contribution per
/// occurrence. Zero vector with covered_terms == 0 when nothing is covered.
ContextVector context_vector(const TokenSequence& tokens, const EmbeddingTable& table);

/// Cosine similarity in [-1, 1]; 0 when either vector has zero norm.
/// Throws UsageError on a dimension mismatch.
double cosine(std::span<const double> u, std::span<const double> v);

inline double cosine(const ContextVector& u, const ContextVector& v) {
    return cosine(u.values, v.values);
}

}  // namespace tailrank
