// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tailrank Authors

#include "tailrank/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <numeric>

#include "tailrank/errors.hpp"

namespace tailrank {

std::string_view to_string(SerVariant v) {
    switch (v) {
        case SerVariant::Basic: return "basic";
        case SerVariant::Pop: return "pop";
        case SerVariant::Types: return "types";
    }
    return "basic";
}

std::string_view to_string(CcrVariant v) {
    return v == CcrVariant::Retrieval ? "retrieval" : "semantic";
}

std::optional<SerVariant> parse_ser_variant(std::string_view s) {
    if (s == "basic") return SerVariant::Basic;
    if (s == "pop") return SerVariant::Pop;
    if (s == "types") return SerVariant::Types;
    return std::nullopt;
}

std::optional<CcrVariant> parse_ccr_variant(std::string_view s) {
    if (s == "retrieval") return CcrVariant::Retrieval;
    if (s == "semantic") return CcrVariant::Semantic;
    return std::nullopt;
}

void PipelineConfig::validate() const {
    if (n < 1) throw UsageError("N must be >= 1");
    if (m < 1) throw UsageError("M must be >= 1");
    if (candidate_cap < 1) throw UsageError("candidate cap must be >= 1");
    if (ser_depth < 1) throw UsageError("support entity retrieval depth must be >= 1");
    if (!(theta >= 0.0 && theta <= 1.0)) throw UsageError("theta must be in [0,1]");
    bm25.validate();
}

std::string PipelineConfig::run_tag() const {
    return std::string(to_string(ser)) + "-n" + std::to_string(n) + "-m" + std::to_string(m) +
           "-" + std::string(to_string(ccr));
}

std::optional<PipelineConfig> PipelineConfig::from_run_tag(std::string_view tag) {
    std::vector<std::string_view> parts;
    for (std::size_t pos = 0;;) {
        const auto dash = tag.find('-', pos);
        parts.push_back(tag.substr(pos, dash - pos));
        if (dash == std::string_view::npos) break;
        pos = dash + 1;
    }
    if (parts.size() != 4) return std::nullopt;
    auto number = [](std::string_view field, char prefix) -> std::optional<std::size_t> {
        if (field.size() < 2 || field[0] != prefix) return std::nullopt;
        std::size_t value = 0;
        const char* end = field.data() + field.size();
        auto [ptr, ec] = std::from_chars(field.data() + 1, end, value);
        if (ec != std::errc() || ptr != end || value == 0) return std::nullopt;
        return value;
    };
    auto ser = parse_ser_variant(parts[0]);
    auto n = number(parts[1], 'n');
    auto m = number(parts[2], 'm');
    auto ccr = parse_ccr_variant(parts[3]);
    if (!ser || !n || !m || !ccr) return std::nullopt;
    PipelineConfig cfg;
    cfg.ser = *ser;
    cfg.n = *n;
    cfg.m = *m;
    cfg.ccr = *ccr;
    return cfg;
}

std::vector<PipelineConfig> configuration_grid(const PipelineConfig& base) {
    std::vector<PipelineConfig> grid;
    for (auto ser : {SerVariant::Basic, SerVariant::Pop, SerVariant::Types})
        for (std::size_t n : {50, 100})
            for (std::size_t m : {50, 100})
                for (auto ccr : {CcrVariant::Semantic, CcrVariant::Retrieval}) {
                    PipelineConfig cfg = base;
                    cfg.ser = ser;
                    cfg.n = n;
                    cfg.m = m;
                    cfg.ccr = ccr;
                    grid.push_back(cfg);
                }
    return grid;
}

// ---------------------------------------------------------------------------
// SER

void normalize(SupportEntityRanking& ranking) {
    double total = 0.0;
    for (const auto& e : ranking.entities) total += e.raw_score;
    for (auto& e : ranking.entities) e.probability = total > 0.0 ? e.raw_score / total : 0.0;
}

InvertedIndex build_catalog_index(const Catalog& catalog) {
    std::vector<std::pair<std::string, std::string>> docs;
    docs.reserve(catalog.size());
    for (const auto& e : catalog.entities()) docs.emplace_back(e.id, e.opening_text);
    return InvertedIndex::build(std::move(docs));
}

SupportEntityRanking rank_support_entities(const EntityQuery& entity,
                                           const InvertedIndex& catalog_index,
                                           const Catalog& catalog, const PipelineConfig& cfg) {
    cfg.validate();
    const auto hits =
        catalog_index.search(analyze(entity.description), cfg.bm25, cfg.ser_depth);
    const std::string_view wanted_type = to_string(entity.entity_type);

    SupportEntityRanking ranking;
    for (const auto& hit : hits) {
        const CatalogEntity* candidate = catalog.find(hit.doc_id);
        if (candidate == nullptr)
            throw IntegrityError("catalog index refers to unknown entity '" + hit.doc_id + "'");
        double raw = hit.score;
        if (cfg.ser == SerVariant::Pop) {
            raw *= static_cast<double>(candidate->inlink_count);
        } else if (cfg.ser == SerVariant::Types) {
            const auto& types = candidate->types;
            if (std::find(types.begin(), types.end(), wanted_type) == types.end()) continue;
        }
        ranking.entities.push_back({candidate->id, raw, 0.0});
    }
    std::stable_sort(ranking.entities.begin(), ranking.entities.end(),
                     [](const auto& a, const auto& b) {
                         if (a.raw_score != b.raw_score) return a.raw_score > b.raw_score;
                         return a.id < b.id;
                     });
    if (ranking.entities.size() > cfg.n) ranking.entities.resize(cfg.n);
    normalize(ranking);
    return ranking;
}

// ---------------------------------------------------------------------------
// SCR

std::vector<std::string> SupportContextSet::union_ids() const {
    std::vector<std::string> ids;
    for (const auto& e : per_entity)
        for (const auto& c : e.contexts) ids.push_back(c.context_id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

void normalize(SupportEntityContexts& entity) {
    double total = 0.0;
    for (const auto& c : entity.contexts) total += c.confidence;
    for (auto& c : entity.contexts) c.probability = total > 0.0 ? c.confidence / total : 0.0;
}

SupportContextSet select_support_contexts(const SupportEntityRanking& ranking,
                                          const AnnotationStore& annotations,
                                          const PipelineConfig& cfg) {
    cfg.validate();
    if (annotations.theta() > cfg.theta)
        throw UsageError("annotation store was loaded with theta " +
                         std::to_string(annotations.theta()) + " above the configured " +
                         std::to_string(cfg.theta));
    SupportContextSet out;
    for (const auto& support : ranking.entities) {
        SupportEntityContexts selected;
        selected.entity_id = support.id;
        // Already in descending confidence, ascending context id order.
        for (const auto& link : annotations.linked_contexts(support.id)) {
            if (selected.contexts.size() == cfg.m) break;
            if (link.confidence < cfg.theta) continue;
            selected.contexts.push_back({link.context_id, link.confidence, 0.0});
        }
        if (selected.contexts.empty()) {
            out.skipped.push_back(support.id);
            continue;
        }
        normalize(selected);
        out.per_entity.push_back(std::move(selected));
    }
    return out;
}

// ---------------------------------------------------------------------------
// CCR

CcrScorer::CcrScorer(const ContextSet& candidates, const PipelineConfig& cfg,
                     const EmbeddingTable* embeddings)
    : candidates_(&candidates), variant_(cfg.ccr), bm25_(cfg.bm25), embeddings_(embeddings) {
    const auto& members = candidates.members;
    if (variant_ == CcrVariant::Retrieval) {
        std::vector<std::pair<std::string, std::string>> docs;
        docs.reserve(members.size());
        for (const Context* c : members) docs.emplace_back(c->context_id, c->text);
        index_ = InvertedIndex::build(std::move(docs));
        ordinal_to_member_.resize(members.size());
        std::iota(ordinal_to_member_.begin(), ordinal_to_member_.end(), std::size_t{0});
        std::sort(ordinal_to_member_.begin(), ordinal_to_member_.end(),
                  [&](std::size_t a, std::size_t b) {
                      return members[a]->context_id < members[b]->context_id;
                  });
    } else {
        if (embeddings_ == nullptr)
            throw UsageError("semantic CCR requires an embedding table");
        vectors_.reserve(members.size());
        for (const Context* c : members)
            vectors_.push_back(context_vector(analyze(c->text), *embeddings_));
    }
}

std::vector<double> CcrScorer::scores(const Context& support) const {
    std::vector<double> out(candidates_->members.size(), 0.0);
    if (variant_ == CcrVariant::Retrieval) {
        const auto by_ordinal = index_.score_all(analyze(support.text), bm25_);
        for (std::size_t ord = 0; ord < by_ordinal.size(); ++ord)
            out[ordinal_to_member_[ord]] = by_ordinal[ord];
    } else {
        const ContextVector support_vector = context_vector(analyze(support.text), *embeddings_);
        for (std::size_t i = 0; i < vectors_.size(); ++i)
            out[i] = std::max(cosine(vectors_[i], support_vector), 0.0);
    }
    return out;
}

std::vector<double> ccr_scores(const Context& support, const ContextSet& candidates,
                               const PipelineConfig& cfg, const EmbeddingTable* embeddings) {
    return CcrScorer(candidates, cfg, embeddings).scores(support);
}

// ---------------------------------------------------------------------------
// Combination

ScoredRanking combine(const ContextSet& candidates, const SupportEntityRanking& entities,
                      const SupportContextSet& support, const ContextStore& contexts,
                      const EmbeddingTable* embeddings, const PipelineConfig& cfg) {
    ScoredRanking result;
    auto& diag = result.diagnostics;
    result.ranking.entity_id = candidates.entity_id;
    result.ranking.run_tag = cfg.run_tag();
    diag.candidates = candidates.size();
    diag.truncated_candidates = candidates.truncated;
    diag.support_entities = entities.size();
    diag.support_entities_used = support.per_entity.size();
    diag.skipped_support_entities = support.skipped.size();

    std::map<std::string_view, double> entity_probability;
    double ser_mass = 0.0;
    for (const auto& e : entities.entities) {
        entity_probability[e.id] = e.probability;
        ser_mass += e.probability;
    }
    double lost = 1.0 - ser_mass;
    for (const auto& id : support.skipped) lost += entity_probability[id];

    // Weight of each support context: sum over support entities of
    // P(c̃|ẽ) P(ẽ|e). Ordered map keeps the reduction order fixed.
    std::map<std::string_view, double> weight;
    for (const auto& e : support.per_entity) {
        auto it = entity_probability.find(e.entity_id);
        if (it == entity_probability.end())
            throw UsageError("support contexts for '" + e.entity_id +
                             "' have no entry in the support entity ranking");
        for (const auto& c : e.contexts) weight[c.context_id] += c.probability * it->second;
    }
    diag.support_contexts = weight.size();

    std::vector<double> scores(candidates.size(), 0.0);
    if (!candidates.empty() && !weight.empty()) {
        const CcrScorer scorer(candidates, cfg, embeddings);
        for (const auto& [context_id, w] : weight) {
            const Context* ctx = contexts.find(context_id);
            if (ctx == nullptr)
                throw IntegrityError("support context '" + std::string(context_id) +
                                     "' is not in the context store");
            const auto raw = scorer.scores(*ctx);
            double denominator = 0.0;
            for (double s : raw) denominator += s;
            if (denominator <= 0.0) {
                ++diag.zero_denominator_contexts;
                lost += w;
                continue;
            }
            for (std::size_t i = 0; i < raw.size(); ++i) scores[i] += w * (raw[i] / denominator);
        }
    } else {
        for (const auto& [context_id, w] : weight) lost += w;
    }

    diag.empty_support = support.per_entity.empty() || ser_mass <= 0.0;
    diag.lost_mass = lost;
    result.ranking.entries.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        diag.total_mass += scores[i];
        result.ranking.entries.push_back({candidates.members[i]->context_id, scores[i]});
    }
    sort_entries(result.ranking.entries);
    return result;
}

ScoredRanking score_contexts(const EntityQuery& entity, const ContextSet& candidates,
                             const Stores& stores, const PipelineConfig& cfg) {
    cfg.validate();
    const auto entities =
        rank_support_entities(entity, stores.catalog_index, stores.catalog, cfg);
    const auto support = select_support_contexts(entities, stores.annotations, cfg);
    auto result = combine(candidates, entities, support, stores.contexts, stores.embeddings, cfg);
    result.ranking.entity_id = entity.id;
    return result;
}

}  // namespace tailrank
