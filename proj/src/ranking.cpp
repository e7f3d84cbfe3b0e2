// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tailrank Authors

#include "tailrank/ranking.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tailrank/errors.hpp"

namespace tailrank {

void sort_entries(std::vector<ScoredContext>& entries) {
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.context_id < b.context_id;
    });
}

std::string format_score(double score) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), score);
    return std::string(buf.data(), ptr);
}

void write_run(std::ostream& out, std::span<const ContextRanking> rankings) {
    for (const auto& ranking : rankings) {
        std::size_t rank = 0;
        for (const auto& entry : ranking.entries)
            out << ranking.entity_id << " Q0 " << entry.context_id << ' ' << ++rank << ' '
                << format_score(entry.score) << ' ' << ranking.run_tag << '\n';
    }
}

Run parse_run(std::istream& in, const std::string& source) {
    struct Line {
        std::size_t rank;
        std::size_t line;
        ScoredContext entry;
    };
    std::map<std::string, std::vector<Line>> lines;
    Run run;
    std::string text;
    std::size_t number = 0;
    while (std::getline(in, text)) {
        ++number;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(text);
        std::string entity, q0, context, rank_field, score_field, tag, extra;
        if (!(fields >> entity >> q0 >> context >> rank_field >> score_field >> tag) ||
            (fields >> extra))
            throw ParseError(source, number, "expected 6 fields: entity Q0 context rank score tag");
        std::size_t rank = 0;
        {
            const char* end = rank_field.data() + rank_field.size();
            auto [ptr, ec] = std::from_chars(rank_field.data(), end, rank);
            if (ec != std::errc() || ptr != end || rank == 0)
                throw ParseError(source, number, "rank must be a positive integer");
        }
        double score = 0.0;
        {
            const char* end = score_field.data() + score_field.size();
            auto [ptr, ec] = std::from_chars(score_field.data(), end, score);
            if (ec != std::errc() || ptr != end)
                throw ParseError(source, number, "score is not a number");
        }
        if (run.tag.empty()) {
            run.tag = tag;
        } else if (tag != run.tag) {
            throw ParseError(source, number,
                             "run tag '" + tag + "' differs from '" + run.tag + "'");
        }
        lines[entity].push_back({rank, number, {std::move(context), score}});
    }
    for (auto& [entity, list] : lines) {
        std::stable_sort(list.begin(), list.end(),
                         [](const auto& a, const auto& b) { return a.rank < b.rank; });
        for (std::size_t i = 1; i < list.size(); ++i)
            if (list[i].rank == list[i - 1].rank)
                throw ParseError(source, list[i].line,
                                 "entity '" + entity + "' repeats rank " +
                                     std::to_string(list[i].rank));
        auto& out = run.by_entity[entity];
        out.reserve(list.size());
        for (auto& l : list) out.push_back(std::move(l.entry));
    }
    return run;
}

Run load_run(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path.string() + "'");
    return parse_run(in, path.string());
}

}  // namespace tailrank
