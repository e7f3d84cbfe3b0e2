// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tailrank Authors

#include <random>

#include <doctest.h>

#include "fixture.hpp"
#include "oracle.hpp"
#include "tailrank/baselines.hpp"
#include "tailrank/errors.hpp"

using namespace tailrank;

namespace {

ContextSet all_of(const ContextStore& store) {
    ContextSet set{"e", {}, 0};
    for (const auto& c : store.contexts()) set.members.push_back(&c);
    return set;
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("sentence retrieval") {
    ContextStore store(std::vector<Context>{
        {"c1", "capital city of france", "d", {}},
        {"c2", "weather report", "d", {}},
        {"c3", "venture capital firm", "d", {}},
        {"c4", "venture fund raised seed round", "d", {}},
    });
    const auto candidates = all_of(store);

    SUBCASE("matching context first, others appended at zero") {
        const EntityQuery e{"e", "a firm", EntityType::Organization, {"E"}};
        const auto ranking = sentence_retrieval_baseline(e, candidates);
        REQUIRE(ranking.entries.size() == 4);
        CHECK(ranking.entries[0].context_id == "c3");
        CHECK(ranking.entries[0].score > 0.0);
        CHECK(ranking.entries[1].context_id == "c1");
        CHECK(ranking.entries[2].context_id == "c2");
        CHECK(ranking.entries[3].context_id == "c4");
        for (std::size_t i = 1; i < 4; ++i) CHECK(ranking.entries[i].score == 0.0);
        CHECK(ranking.run_tag == kSentenceRetrievalTag);
    }
    SUBCASE("no overlap keeps id order") {
        const EntityQuery e{"e", "zebra", EntityType::Organization, {"E"}};
        const auto ranking = sentence_retrieval_baseline(e, candidates);
        REQUIRE(ranking.entries.size() == 4);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(ranking.entries[i].context_id == "c" + std::to_string(i + 1));
            CHECK(ranking.entries[i].score == 0.0);
        }
    }
    SUBCASE("scores match the reference formula") {
        const EntityQuery e{"e", "venture capital", EntityType::Organization, {"E"}};
        std::vector<std::vector<std::string>> corpus;
        for (const auto& c : store.contexts()) corpus.push_back(analyze(c.text));
        const auto ranking = sentence_retrieval_baseline(e, candidates, {1.2, 0.8});
        for (const auto& entry : ranking.entries) {
            const auto pos = static_cast<std::size_t>(entry.context_id[1] - '1');
            CHECK(entry.score == doctest::Approx(oracle::bm25(corpus, pos, analyze(e.description),
                                                              1.2, 0.8))
                                     .epsilon(1e-12));
        }
    }
}

TEST_CASE("linker") {
    ContextStore store(std::vector<Context>{{"c1", "x", "d", {}}, {"c2", "y", "d", {}}});
    const auto candidates = all_of(store);
    AnnotationStore annotations({{"c1", "E", 0.7}, {"c2", "E", 0.95}, {"c2", "Other", 0.99}}, 0.0);
    const EntityQuery e{"E", "desc", EntityType::Organization, {"E"}};

    SUBCASE("theta 0.6 keeps the 0.7 link") {
        const auto ranking = linker_baseline(e, candidates, annotations, 0.6);
        REQUIRE(ranking.entries.size() == 2);
        CHECK(ranking.entries[0].context_id == "c2");
        CHECK(ranking.entries[1].score == 0.7);
        CHECK(ranking.run_tag == "linker-t0.6");
    }
    SUBCASE("theta 0.9 drops it") {
        const auto ranking = linker_baseline(e, candidates, annotations, 0.9);
        REQUIRE(ranking.entries.size() == 1);
        CHECK(ranking.entries[0].context_id == "c2");
    }
    SUBCASE("entity absent from the annotations") {
        const EntityQuery unknown{"new-firm", "desc", EntityType::Organization, {"E"}};
        for (double theta : {0.0, 0.6, 0.9})
            CHECK(linker_baseline(unknown, candidates, annotations, theta).entries.empty());
    }
    SUBCASE("threshold checks") {
        CHECK_THROWS_AS(linker_baseline(e, candidates, annotations, 1.1), UsageError);
        AnnotationStore strict({{"c1", "E", 0.95}}, 0.9);
        CHECK_THROWS_AS(linker_baseline(e, candidates, strict, 0.6), UsageError);
    }
}

TEST_CASE("linker scores are non-increasing in theta") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Context> contexts;
    std::vector<LinkAnnotation> links;
    for (int i = 0; i < 30; ++i) {
        const std::string id = "c" + std::to_string(100 + i);
        contexts.push_back({id, "text", "d", {}});
        links.push_back({id, "E", unit(rng)});
        if (i % 3 == 0) links.push_back({id, "E", unit(rng)});
    }
    ContextStore store(std::move(contexts));
    AnnotationStore annotations(links, 0.0);
    const auto candidates = all_of(store);
    const EntityQuery e{"E", "desc", EntityType::Organization, {"E"}};

    auto score_map = [&](double theta) {
        std::map<std::string, double> m;
        for (const auto& entry : linker_baseline(e, candidates, annotations, theta).entries)
            m[entry.context_id] = entry.score;
        return m;
    };
    for (int trial = 0; trial < 100; ++trial) {
        double lo = unit(rng), hi = unit(rng);
        if (lo > hi) std::swap(lo, hi);
        const auto low = score_map(lo);
        for (const auto& [id, score] : score_map(hi)) {
            REQUIRE(low.count(id) == 1);
            CHECK(low.at(id) >= score);
        }
    }
}

TEST_CASE("baseline and pipeline produce different rankings on the fixture") {
    const fixture::Fixture fx;
    PipelineConfig cfg;
    cfg.ccr = CcrVariant::Retrieval;
    for (const auto& entity : fx.entities) {
        const auto candidates = gather_candidate_contexts(entity, fx.contexts);
        const auto baseline = sentence_retrieval_baseline(entity, candidates);
        const auto pipeline = score_contexts(entity, candidates, fx.stores(), cfg);
        REQUIRE(baseline.entries.size() == pipeline.ranking.entries.size());
        bool differs = false;
        for (std::size_t i = 0; i < baseline.entries.size(); ++i)
            differs = differs || baseline.entries[i].score != pipeline.ranking.entries[i].score;
        CHECK(differs);
    }
}

}  // TEST_SUITE
