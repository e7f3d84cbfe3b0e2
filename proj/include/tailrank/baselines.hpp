// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tailrank Authors

#pragma once

#include <string>

#include "tailrank/datamodel.hpp"
#include "tailrank/ranking.hpp"
#include "tailrank/textindex.hpp"

namespace tailrank {

inline constexpr const char* kSentenceRetrievalTag = "bm25-baseline";

/// Run tag of the linker baseline at `theta`, e.g. "linker-t0.6".
std::string linker_run_tag(double theta);

/// BM25 over an index of exactly C, querying with the entity description.
/// Contexts sharing no query term follow at score 0 in ascending id order.
ContextRanking sentence_retrieval_baseline(const EntityQuery& entity, const ContextSet& candidates,
                                           const Bm25Params& params = {});

/// Lists the contexts of C linked to the entity's own id with confidence at or
/// above `theta`, scored by that confidence. Unlinked contexts score 0 and are
/// not listed, so an entity absent from the annotation store gets an empty
/// ranking.
ContextRanking linker_baseline(const EntityQuery& entity, const ContextSet& candidates,
                               const AnnotationStore& annotations, double theta);

}  // namespace tailrank
