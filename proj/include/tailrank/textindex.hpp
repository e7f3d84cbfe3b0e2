// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tailrank Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tailrank {

/// Lowercase, non-empty terms in text order.
using TokenSequence = std::vector<std::string>;

/// Lowercases and splits on every non-alphanumeric code point. No stemming,
/// no stopword removal.
TokenSequence analyze(std::string_view text);

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.8;

    /// Throws UsageError unless k1 > 0 and b in [0,1].
    void validate() const;
};

struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;
};

/// Inverted index over a fixed set of documents.
///
/// Documents are numbered 0..doc_count()-1 in ascending doc id order, so
/// posting lists sorted by ordinal are also sorted by doc id.
class InvertedIndex {
public:
    struct Posting {
        std::uint32_t doc = 0;
        std::uint32_t tf = 0;
    };

    static constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

    InvertedIndex() = default;

    /// Throws IntegrityError on a duplicate doc id.
    static InvertedIndex build(std::vector<std::pair<std::string, std::string>> docs);

    std::size_t doc_count() const { return doc_ids_.size(); }
    double average_doc_length() const { return avg_doc_length_; }
    std::size_t term_count() const { return postings_.size(); }
    const std::string& doc_id(std::size_t ordinal) const { return doc_ids_[ordinal]; }
    std::uint32_t doc_length(std::size_t ordinal) const { return doc_lengths_[ordinal]; }
    std::span<const Posting> postings(const std::string& term) const;

    /// Non-negative idf: ln(1 + (N - df + 0.5) / (df + 0.5)).
    double idf(std::size_t df) const;

    /// BM25 score of every document, indexed by ordinal. Documents sharing no
    /// query term score exactly 0.
    std::vector<double> score_all(const TokenSequence& query, const Bm25Params& params) const;

    /// Top-k documents with a positive score, descending score, ties by
    /// ascending doc id.
    std::vector<ScoredDoc> search(const TokenSequence& query, const Bm25Params& params,
                                  std::size_t k) const;

    /// Checks the structural invariants; throws IntegrityError on violation.
    void check_invariants() const;

    void save(std::ostream& out) const;
    static InvertedIndex load(std::istream& in, const std::string& source);
    void save(const std::filesystem::path& path) const;
    static InvertedIndex load(const std::filesystem::path& path);

private:
    std::vector<std::string> doc_ids_;
    std::vector<std::uint32_t> doc_lengths_;
    double avg_doc_length_ = 0.0;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
};

inline std::vector<ScoredDoc> bm25_search(const InvertedIndex& index, const TokenSequence& query,
                                          const Bm25Params& params, std::size_t k) {
    return index.search(query, params, k);
}

}  // namespace tailrank
