// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tailrank Authors

#include "tailrank/baselines.hpp"

#include <algorithm>
#include <unordered_map>

#include "tailrank/errors.hpp"

namespace tailrank {

std::string linker_run_tag(double theta) { return "linker-t" + format_score(theta); }

ContextRanking sentence_retrieval_baseline(const EntityQuery& entity, const ContextSet& candidates,
                                           const Bm25Params& params) {
    std::vector<std::pair<std::string, std::string>> docs;
    docs.reserve(candidates.size());
    for (const Context* c : candidates.members) docs.emplace_back(c->context_id, c->text);
    const auto index = InvertedIndex::build(std::move(docs));
    const auto scores = index.score_all(analyze(entity.description), params);

    ContextRanking ranking;
    ranking.entity_id = entity.id;
    ranking.run_tag = kSentenceRetrievalTag;
    ranking.entries.reserve(scores.size());
    for (std::size_t ord = 0; ord < scores.size(); ++ord)
        ranking.entries.push_back({index.doc_id(ord), scores[ord]});
    sort_entries(ranking.entries);
    return ranking;
}

ContextRanking linker_baseline(const EntityQuery& entity, const ContextSet& candidates,
                               const AnnotationStore& annotations, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw UsageError("theta must be in [0,1]");
    if (annotations.theta() > theta)
        throw UsageError("linker baseline needs annotations loaded at theta <= " +
                         format_score(theta));

    std::unordered_map<std::string_view, double> linked;
    for (const auto& link : annotations.linked_contexts(entity.id))
        if (link.confidence >= theta) linked.emplace(link.context_id, link.confidence);

    ContextRanking ranking;
    ranking.entity_id = entity.id;
    ranking.run_tag = linker_run_tag(theta);
    for (const Context* c : candidates.members)
        if (auto it = linked.find(c->context_id); it != linked.end())
            ranking.entries.push_back({c->context_id, it->second});
    sort_entries(ranking.entries);
    return ranking;
}

}  // namespace tailrank
