// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tailrank Authors

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tailrank/datamodel.hpp"
#include "tailrank/embeddings.hpp"
#include "tailrank/ranking.hpp"
#include "tailrank/textindex.hpp"

namespace tailrank {

enum class SerVariant { Basic, Pop, Types };
enum class CcrVariant { Retrieval, Semantic };

std::string_view to_string(SerVariant v);
std::string_view to_string(CcrVariant v);
std::optional<SerVariant> parse_ser_variant(std::string_view s);
std::optional<CcrVariant> parse_ccr_variant(std::string_view s);

struct PipelineConfig {
    SerVariant ser = SerVariant::Basic;
    /// Support entities kept after ranking.
    std::size_t n = 50;
    /// Support contexts kept per support entity.
    std::size_t m = 50;
    CcrVariant ccr = CcrVariant::Semantic;
    double theta = 0.9;
    Bm25Params bm25;
    std::size_t candidate_cap = kDefaultCandidateCap;
    /// Support entities retrieved before variant filtering and the N cut-off.
    std::size_t ser_depth = 200;

    /// Throws UsageError when a field is out of range.
    void validate() const;
    /// e.g. "basic-n50-m50-semantic".
    std::string run_tag() const;
    /// Inverse of run_tag() over the variant/N/M/CCR fields; other fields keep defaults.
    static std::optional<PipelineConfig> from_run_tag(std::string_view tag);
};

/// The 3 SER x 2 N x 2 M x 2 CCR grid, with the remaining fields taken from `base`.
std::vector<PipelineConfig> configuration_grid(const PipelineConfig& base = {});

// ---------------------------------------------------------------------------
// Support entity ranking, P(ẽ|e)

struct SupportEntity {
    std::string id;
    double raw_score = 0.0;
    double probability = 0.0;
};

/// Descending raw score, ties by ascending id.
struct SupportEntityRanking {
    std::vector<SupportEntity> entities;

    bool empty() const { return entities.empty(); }
    std::size_t size() const { return entities.size(); }
};

/// Sets each probability to raw / sum(raw); all zero when the sum is zero.
void normalize(SupportEntityRanking& ranking);

/// Catalog index over opening text, doc ids = catalog entity ids.
InvertedIndex build_catalog_index(const Catalog& catalog);

SupportEntityRanking rank_support_entities(const EntityQuery& entity,
                                           const InvertedIndex& catalog_index,
                                           const Catalog& catalog, const PipelineConfig& cfg);

// ---------------------------------------------------------------------------
// Support context ranking, P(c̃|ẽ)

struct SupportContext {
    std::string context_id;
    double confidence = 0.0;
    double probability = 0.0;
};

struct SupportEntityContexts {
    std::string entity_id;
    /// Descending confidence, ties by ascending context id.
    std::vector<SupportContext> contexts;
};

struct SupportContextSet {
    /// In support entity ranking order; entities without linked contexts are absent.
    std::vector<SupportEntityContexts> per_entity;
    /// Support entities with no retained linked context.
    std::vector<std::string> skipped;

    /// Distinct support context ids across all entities, ascending.
    std::vector<std::string> union_ids() const;
};

/// Sets each probability to confidence / sum(confidence) within one entity.
void normalize(SupportEntityContexts& entity);

SupportContextSet select_support_contexts(const SupportEntityRanking& ranking,
                                          const AnnotationStore& annotations,
                                          const PipelineConfig& cfg);

// ---------------------------------------------------------------------------
// Context-to-context ranking, P(c|e,c̃)

/// Per-entity CCR state: an index over exactly C (retrieval) or the averaged
/// vectors of C (semantic). `candidates` must outlive the scorer.
class CcrScorer {
public:
    CcrScorer(const ContextSet& candidates, const PipelineConfig& cfg,
              const EmbeddingTable* embeddings);

    /// Raw non-negative scores of every member of C against `support`, aligned
    /// with the candidate set's member order.
    std::vector<double> scores(const Context& support) const;

private:
    const ContextSet* candidates_;
    CcrVariant variant_;
    Bm25Params bm25_;
    const EmbeddingTable* embeddings_;
    InvertedIndex index_;
    /// index ordinal -> position in candidates_->members
    std::vector<std::size_t> ordinal_to_member_;
    std::vector<ContextVector> vectors_;
};

std::vector<double> ccr_scores(const Context& support, const ContextSet& candidates,
                               const PipelineConfig& cfg, const EmbeddingTable* embeddings);

// ---------------------------------------------------------------------------
// Combination

struct RankingDiagnostics {
    std::size_t candidates = 0;
    std::size_t truncated_candidates = 0;
    std::size_t support_entities = 0;
    /// Support entities contributing at least one support context.
    std::size_t support_entities_used = 0;
    std::size_t skipped_support_entities = 0;
    /// |C̃|, distinct support contexts.
    std::size_t support_contexts = 0;
    /// Support contexts whose CCR scores over C sum to zero.
    std::size_t zero_denominator_contexts = 0;
    /// Sum of P(c|e) over C.
    double total_mass = 0.0;
    /// Probability mass lost to unnormalized SER, skipped entities and
    /// zero-denominator support contexts.
    double lost_mass = 0.0;
    /// No usable support information: every context scored 0.
    bool empty_support = false;
};

struct ScoredRanking {
    ContextRanking ranking;
    RankingDiagnostics diagnostics;
};

struct Stores {
    const Catalog& catalog;
    const InvertedIndex& catalog_index;
    /// Holds both candidate and support contexts.
    const ContextStore& contexts;
    const AnnotationStore& annotations;
    /// Required for semantic CCR only.
    const EmbeddingTable* embeddings = nullptr;
};

/// P(c|e) for every c in C from precomputed support structures. Throws
/// IntegrityError when a support context is missing from `contexts`.
ScoredRanking combine(const ContextSet& candidates, const SupportEntityRanking& entities,
                      const SupportContextSet& support, const ContextStore& contexts,
                      const EmbeddingTable* embeddings, const PipelineConfig& cfg);

/// Full pipeline for one long-tail entity.
ScoredRanking score_contexts(const EntityQuery& entity, const ContextSet& candidates,
                             const Stores& stores, const PipelineConfig& cfg);

}  // namespace tailrank
