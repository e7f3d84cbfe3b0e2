// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tailrank Authors

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace tailrank {

struct ScoredContext {
    std::string context_id;
    double score = 0.0;
};

/// Ordered scored contexts for one entity under one configuration.
struct ContextRanking {
    std::string entity_id;
    std::string run_tag;
    std::vector<ScoredContext> entries;
};

/// Descending score, ties by ascending context id.
void sort_entries(std::vector<ScoredContext>& entries);

/// Shortest decimal text that parses back to the same double.
std::string format_score(double score);

/// TREC run lines: `entity_id Q0 context_id rank score run_tag`, rank from 1.
/// Rankings are written in the order given, entries in stored order.
void write_run(std::ostream& out, std::span<const ContextRanking> rankings);

/// One parsed run file: per entity, contexts in rank order.
struct Run {
    std::string tag;
    std::map<std::string, std::vector<ScoredContext>> by_entity;
};

/// Throws ParseError with the line number on a malformed line, and when a
/// file mixes run tags or repeats a rank for an entity.
Run parse_run(std::istream& in, const std::string& source);
Run load_run(const std::filesystem::path& path);

}  // namespace tailrank
