// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tailrank Authors

#include "tailrank/textindex.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <unicode/locid.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "tailrank/errors.hpp"

namespace tailrank {

namespace {

constexpr std::string_view kSnapshotMagic = "tailrank-index";
constexpr int kSnapshotVersion = 1;

void flush_token(icu::UnicodeString& token, TokenSequence& out) {
    if (token.isEmpty()) return;
    token.toLower(icu::Locale::getRoot());
    std::string utf8;
    token.toUTF8String(utf8);
    out.push_back(std::move(utf8));
    token.remove();
}

}  // namespace

TokenSequence analyze(std::string_view text) {
    TokenSequence out;
    icu::UnicodeString token;
    const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
    const auto length = static_cast<int32_t>(text.size());
    for (int32_t offset = 0; offset < length;) {
        UChar32 cp;
        U8_NEXT(bytes, offset, length, cp);
        if (cp >= 0 && u_isalnum(cp)) {
            token.append(cp);
        } else {
            flush_token(token, out);
        }
    }
    flush_token(token, out);
    return out;
}

void Bm25Params::validate() const {
    if (!(k1 > 0.0)) throw UsageError("BM25 k1 must be > 0");
    if (!(b >= 0.0 && b <= 1.0)) throw UsageError("BM25 b must be in [0,1]");
}

InvertedIndex InvertedIndex::build(std::vector<std::pair<std::string, std::string>> docs) {
    std::sort(docs.begin(), docs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < docs.size(); ++i)
        if (docs[i].first == docs[i - 1].first)
            throw IntegrityError("duplicate doc id '" + docs[i].first + "'");

    InvertedIndex index;
    index.doc_ids_.reserve(docs.size());
    index.doc_lengths_.reserve(docs.size());
    double total_length = 0.0;
    for (std::size_t ordinal = 0; ordinal < docs.size(); ++ordinal) {
        auto& [id, text] = docs[ordinal];
        const TokenSequence tokens = analyze(text);
        std::map<std::string_view, std::uint32_t> tf;
        for (const auto& t : tokens) ++tf[t];
        for (const auto& [term, freq] : tf)
            index.postings_[std::string(term)].push_back(
                {static_cast<std::uint32_t>(ordinal), freq});
        index.doc_ids_.push_back(std::move(id));
        index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
        total_length += static_cast<double>(tokens.size());
    }
    index.avg_doc_length_ =
        docs.empty() ? 0.0 : total_length / static_cast<double>(index.doc_ids_.size());
    return index;
}

std::span<const InvertedIndex::Posting> InvertedIndex::postings(const std::string& term) const {
    auto it = postings_.find(term);
    if (it == postings_.end()) return {};
    return it->second;
}

double InvertedIndex::idf(std::size_t df) const {
    const double n = static_cast<double>(doc_count());
    const double d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

std::vector<double> InvertedIndex::score_all(const TokenSequence& query,
                                             const Bm25Params& params) const {
    params.validate();
    std::vector<double> scores(doc_count(), 0.0);
    if (doc_count() == 0 || avg_doc_length_ <= 0.0) return scores;

    // Terms are visited in sorted order with their query frequency so the
    // floating point accumulation order does not depend on query token order.
    std::map<std::string_view, std::uint32_t> query_tf;
    for (const auto& t : query) ++query_tf[t];

    for (const auto& [term, qtf] : query_tf) {
        auto it = postings_.find(std::string(term));
        if (it == postings_.end()) continue;
        const double weight = idf(it->second.size()) * static_cast<double>(qtf);
        for (const Posting& p : it->second) {
            const double tf = static_cast<double>(p.tf);
            const double norm =
                params.k1 * (1.0 - params.b +
                             params.b * static_cast<double>(doc_lengths_[p.doc]) / avg_doc_length_);
            scores[p.doc] += weight * tf * (params.k1 + 1.0) / (tf + norm);
        }
    }
    return scores;
}

std::vector<ScoredDoc> InvertedIndex::search(const TokenSequence& query, const Bm25Params& params,
                                             std::size_t k) const {
    if (k == 0) return {};
    const std::vector<double> scores = score_all(query, params);

    std::vector<std::uint32_t> hits;
    for (std::size_t d = 0; d < scores.size(); ++d)
        if (scores[d] > 0.0) hits.push_back(static_cast<std::uint32_t>(d));
    // Ordinal order equals doc id order.
    auto better = [&](std::uint32_t a, std::uint32_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    };
    if (hits.size() > k) {
        std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(),
                          better);
        hits.resize(k);
    } else {
        std::sort(hits.begin(), hits.end(), better);
    }

    std::vector<ScoredDoc> out;
    out.reserve(hits.size());
    for (auto d : hits) out.push_back({doc_ids_[d], scores[d]});
    return out;
}

void InvertedIndex::check_invariants() const {
    if (doc_lengths_.size() != doc_ids_.size())
        throw IntegrityError("index: doc length table size mismatch");
    for (std::size_t i = 1; i < doc_ids_.size(); ++i)
        if (!(doc_ids_[i - 1] < doc_ids_[i]))
            throw IntegrityError("index: doc ids not strictly ascending");
    double total = 0.0;
    for (auto len : doc_lengths_) total += len;
    const double expected = doc_ids_.empty() ? 0.0 : total / static_cast<double>(doc_ids_.size());
    if (std::abs(expected - avg_doc_length_) > 1e-9 * std::max(1.0, expected))
        throw IntegrityError("index: average doc length mismatch");
    for (const auto& [term, list] : postings_) {
        if (term.empty()) throw IntegrityError("index: empty term");
        if (list.size() > doc_ids_.size())
            throw IntegrityError("index: posting list longer than doc count for '" + term + "'");
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (list[i].doc >= doc_ids_.size() || list[i].tf == 0)
                throw IntegrityError("index: invalid posting for '" + term + "'");
            if (i > 0 && list[i - 1].doc >= list[i].doc)
                throw IntegrityError("index: postings not ascending for '" + term + "'");
        }
    }
}

// Snapshot layout, whitespace separated text:
//   tailrank-index 1
//   <doc_count> <term_count>
//   <doc_length> <quoted doc id>          (doc_count lines)
//   <quoted term> <n> <doc> <tf> ...      (term_count lines, sorted by term)
void InvertedIndex::save(std::ostream& out) const {
    out << kSnapshotMagic << ' ' << kSnapshotVersion << '\n';
    out << doc_ids_.size() << ' ' << postings_.size() << '\n';
    for (std::size_t d = 0; d < doc_ids_.size(); ++d)
        out << doc_lengths_[d] << ' ' << std::quoted(doc_ids_[d]) << '\n';
    std::vector<const std::string*> terms;
    terms.reserve(postings_.size());
    for (const auto& [term, list] : postings_) terms.push_back(&term);
    std::sort(terms.begin(), terms.end(), [](auto* a, auto* b) { return *a < *b; });
    for (const std::string* term : terms) {
        const auto& list = postings_.at(*term);
        out << std::quoted(*term) << ' ' << list.size();
        for (const auto& p : list) out << ' ' << p.doc << ' ' << p.tf;
        out << '\n';
    }
}

InvertedIndex InvertedIndex::load(std::istream& in, const std::string& source) {
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != kSnapshotMagic)
        throw ParseError(source, 1, "not a tailrank index snapshot");
    if (version != kSnapshotVersion)
        throw ParseError(source, 1, "unsupported snapshot version " + std::to_string(version));
    std::size_t docs = 0;
    std::size_t terms = 0;
    if (!(in >> docs >> terms)) throw ParseError(source, 2, "bad header counts");

    InvertedIndex index;
    double total = 0.0;
    std::size_t line = 2;
    for (std::size_t d = 0; d < docs; ++d) {
        ++line;
        std::uint32_t len = 0;
        std::string id;
        if (!(in >> len >> std::quoted(id))) throw ParseError(source, line, "bad document entry");
        index.doc_lengths_.push_back(len);
        index.doc_ids_.push_back(std::move(id));
        total += len;
    }
    index.avg_doc_length_ = docs == 0 ? 0.0 : total / static_cast<double>(docs);
    for (std::size_t t = 0; t < terms; ++t) {
        ++line;
        std::string term;
        std::size_t n = 0;
        if (!(in >> std::quoted(term) >> n)) throw ParseError(source, line, "bad term entry");
        std::vector<Posting> list(n);
        for (auto& p : list)
            if (!(in >> p.doc >> p.tf)) throw ParseError(source, line, "bad posting");
        index.postings_.emplace(std::move(term), std::move(list));
    }
    try {
        index.check_invariants();
    } catch (const IntegrityError& e) {
        throw ParseError(source, line, e.what());
    }
    return index;
}

void InvertedIndex::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path.string() + "'");
    save(out);
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open '" + path.string() + "'");
    return load(in, path.string());
}

}  // namespace tailrank
