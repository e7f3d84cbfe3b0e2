// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tailrank Authors

#include <algorithm>
#include <random>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>
#include <doctest.h>
#include <json.hpp>

#include "oracle.hpp"
#include "tailrank/errors.hpp"
#include "tailrank/evalkit.hpp"

using namespace tailrank;

namespace {

std::vector<ScoredContext> ranked(std::initializer_list<const char*> ids) {
    std::vector<ScoredContext> out;
    double score = 1.0;
    for (const char* id : ids) out.push_back({id, score /= 2.0});
    return out;
}

Run run_of(std::string tag, std::map<std::string, std::vector<ScoredContext>> by_entity) {
    return Run{std::move(tag), std::move(by_entity)};
}

double boost_two_tailed(double t, double df) {
    boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

const std::vector<double> kA{0.52, 0.61, 0.33, 0.78, 0.45};
const std::vector<double> kB{0.41, 0.58, 0.30, 0.62, 0.47};

}  // namespace

TEST_SUITE("evalkit") {

TEST_CASE("average precision and reciprocal rank") {
    const Judgments judged{{"r1", 1}, {"r2", 1}, {"n1", 0}};
    CHECK(average_precision(ranked({"r1", "n1", "r2"}), judged) == 5.0 / 6.0);
    CHECK(average_precision(ranked({"n1", "x"}), Judgments{{"r1", 1}}) == 0.0);
    CHECK(average_precision(ranked({"r2", "r1", "n1"}), judged) == 1.0);
    CHECK(average_precision(ranked({"r1"}), Judgments{{"n1", 0}}) == 0.0);

    CHECK(reciprocal_rank(ranked({"n1", "r1"}), judged) == 0.5);
    CHECK(reciprocal_rank(ranked({"r1", "n1"}), judged) == 1.0);
    CHECK(reciprocal_rank(ranked({"n1", "x"}), judged) == 0.0);

    // A repeated context counts once, at its first rank.
    CHECK(reciprocal_rank(ranked({"n1", "n1", "r1"}), judged) == 0.5);
    // Unjudged contexts are non-relevant.
    CHECK(reciprocal_rank(ranked({"unjudged", "r1"}), judged) == 0.5);
}

TEST_CASE("metrics match the definitions on random rankings") {
    std::mt19937 rng(2026);
    std::uniform_int_distribution<int> length(0, 40), coin(0, 2), pool(0, 60);
    for (int trial = 0; trial < 1000; ++trial) {
        Judgments judged;
        for (int i = 0; i < 60; ++i)
            if (coin(rng) != 0) judged["c" + std::to_string(i)] = coin(rng) == 2 ? 1 : 0;
        std::vector<std::string> ids;
        for (int i = 0; i <= 60; ++i) ids.push_back("c" + std::to_string(i));
        std::shuffle(ids.begin(), ids.end(), rng);
        ids.resize(static_cast<std::size_t>(length(rng)));

        std::vector<ScoredContext> ranking;
        std::vector<int> labels;
        for (const auto& id : ids) {
            ranking.push_back({id, 0.0});
            auto it = judged.find(id);
            labels.push_back(it != judged.end() && it->second == 1 ? 1 : 0);
        }
        const std::size_t r = relevant_count(judged);
        CHECK(average_precision(ranking, judged) == oracle::definitional_ap(labels, r));
        CHECK(reciprocal_rank(ranking, judged) == oracle::definitional_rr(labels));
    }
}

TEST_CASE("qrels parsing") {
    std::istringstream ok("e1 0 c1 1\ne1 0 c2 0\ne2 0 c1 1\n");
    const auto qrels = parse_qrels(ok, "mem");
    REQUIRE(qrels.find("e1") != nullptr);
    CHECK(relevant_count(*qrels.find("e1")) == 1);
    CHECK(qrels.find("e3") == nullptr);

    std::ostringstream out;
    write_qrels(out, qrels);
    CHECK(out.str() == "e1 0 c1 1\ne1 0 c2 0\ne2 0 c1 1\n");

    std::istringstream graded("e1 0 c1 1\ne1 0 c2 2\n");
    try {
        parse_qrels(graded, "mem");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    std::istringstream short_line("e1 0 c1\n");
    CHECK_THROWS_AS(parse_qrels(short_line, "mem"), ParseError);
}

TEST_CASE("run parsing") {
    std::istringstream ok("e1 Q0 c2 1 0.5 tag\ne1 Q0 c1 2 0.25 tag\n");
    const auto run = parse_run(ok, "mem");
    CHECK(run.tag == "tag");
    REQUIRE(run.by_entity.at("e1").size() == 2);
    CHECK(run.by_entity.at("e1")[0].context_id == "c2");

    std::istringstream bad("e1 Q0 c2 1 0.5 tag\ne1 Q0 c1 two 0.25 tag\n");
    try {
        parse_run(bad, "mem");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    std::istringstream mixed("e1 Q0 c2 1 0.5 a\ne1 Q0 c1 2 0.25 b\n");
    CHECK_THROWS_AS(parse_run(mixed, "mem"), ParseError);
    std::istringstream repeated("e1 Q0 c2 1 0.5 a\ne1 Q0 c1 1 0.25 a\n");
    CHECK_THROWS_AS(parse_run(repeated, "mem"), ParseError);
}

TEST_CASE("paired t-test") {
    SUBCASE("five pairs against reference values") {
        const auto r = paired_ttest(kA, kB);
        CHECK(r.n == 5);
        CHECK(std::abs(r.t - 1.928108282070482) <= 1e-6);
        CHECK(std::abs(r.p - 0.12608945682584352) <= 1e-6);
        CHECK(std::abs(r.p - boost_two_tailed(r.t, 4.0)) <= 1e-6);
    }
    SUBCASE("antisymmetry") {
        const auto ab = paired_ttest(kA, kB);
        const auto ba = paired_ttest(kB, kA);
        CHECK(ab.t == -ba.t);
        CHECK(std::abs(ab.p - ba.p) <= 1e-12);
    }
    SUBCASE("identical samples") {
        const auto r = paired_ttest(kA, kA);
        CHECK(r.t == 0.0);
        CHECK(r.p == 1.0);
        CHECK_FALSE(r.degenerate_variance);
    }
    SUBCASE("constant nonzero difference") {
        const std::vector<double> a{1.0, 2.0, 3.0}, b{0.5, 1.5, 2.5};
        const auto r = paired_ttest(a, b);
        CHECK(r.degenerate_variance);
        CHECK(r.p == 0.0);
        CHECK(std::isinf(r.t));
    }
    SUBCASE("usage errors") {
        CHECK_THROWS_AS(paired_ttest(std::vector<double>{1.0}, std::vector<double>{2.0}),
                        UsageError);
        CHECK_THROWS_AS(paired_ttest(kA, std::vector<double>{1.0, 2.0}), UsageError);
    }
    SUBCASE("t distribution tails against an independent implementation") {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> t_dist(-12.0, 12.0);
        for (double df : {1.0, 2.0, 4.0, 9.0, 30.0, 164.0})
            for (int i = 0; i < 50; ++i) {
                const double t = t_dist(rng);
                CHECK(std::abs(student_t_two_tailed_p(t, df) - boost_two_tailed(t, df)) <= 1e-10);
            }
    }
    SUBCASE("markers") {
        CHECK(significance_marker(0.2).empty());
        CHECK(significance_marker(0.01) == "†");
        CHECK(significance_marker(0.0001) == "‡");
    }
}

TEST_CASE("evaluating runs") {
    Qrels qrels;
    qrels.by_entity["e1"] = {{"a", 1}, {"b", 1}, {"c", 1}, {"d", 1}, {"e", 1}, {"x", 0}};
    qrels.by_entity["e2"] = {{"a", 1}, {"b", 1}, {"c", 1}, {"d", 1}, {"e", 1}};

    // Two of five relevant retrieved on top gives AP 0.4; three gives 0.6.
    const Run run = run_of("sys", {{"e1", ranked({"a", "b", "x"})},
                                   {"e2", ranked({"a", "b", "c"})}});
    Partition partition;
    partition.labels = {"in-kb", "out-of-kb"};
    partition.label_of = {{"e1", "in-kb"}, {"e2", "out-of-kb"}};

    SUBCASE("MAP is the mean of AP") {
        const std::vector<Run> runs{run};
        const auto report = evaluate_runs(runs, qrels);
        CHECK(report.blocks == std::vector<std::string>{"All"});
        const auto& all = report.runs[0].blocks[0];
        CHECK(std::abs(report.runs[0].evaluation.per_entity[0].ap - 0.4) <= 1e-12);
        CHECK(std::abs(report.runs[0].evaluation.per_entity[1].ap - 0.6) <= 1e-12);
        CHECK(std::abs(all.map - 0.5) <= 1e-12);
        CHECK(all.mrr == 1.0);
    }
    SUBCASE("subset blocks") {
        const std::vector<Run> runs{run};
        const auto report = evaluate_runs(runs, qrels, partition);
        CHECK(report.blocks == std::vector<std::string>{"All", "in-kb", "out-of-kb"});
        CHECK(report.runs[0].blocks[1].map == report.runs[0].evaluation.per_entity[0].ap);
        CHECK(report.runs[0].blocks[2].map == report.runs[0].evaluation.per_entity[1].ap);
        CHECK(report.runs[0].blocks[1].entities == 1);
    }
    SUBCASE("missing entity scores zero and is flagged") {
        const std::vector<Run> runs{run_of("partial", {{"e1", ranked({"a", "b"})}, {"zz", ranked({"a"})}})};
        const auto report = evaluate_runs(runs, qrels);
        const auto& per = report.runs[0].evaluation.per_entity;
        CHECK(per[1].missing_from_run);
        CHECK(per[1].ap == 0.0);
        CHECK(std::abs(report.runs[0].blocks[0].map - 0.2) <= 1e-12);
        CHECK(report.runs[0].evaluation.unjudged_entities == std::vector<std::string>{"zz"});
    }
    SUBCASE("grid references and markers") {
        const std::vector<Run> runs{
            run_of("basic-n50-m50-semantic", {{"e1", ranked({"x", "a"})}, {"e2", ranked({"x", "a"})}}),
            run_of("pop-n50-m50-semantic", {{"e1", ranked({"a", "x"})}, {"e2", ranked({"a", "x"})}}),
            run_of("types-n50-m50-retrieval", {{"e1", ranked({"a"})}, {"e2", ranked({"a"})}}),
        };
        const auto report = evaluate_runs(runs, qrels, partition);
        CHECK_FALSE(report.runs[0].reference.has_value());
        CHECK(report.runs[1].reference == std::optional<std::string>("basic-n50-m50-semantic"));
        CHECK_FALSE(report.runs[2].reference.has_value());
        REQUIRE(report.runs[1].blocks[0].mrr_test.has_value());
        CHECK(report.runs[1].blocks[0].mrr_test->degenerate_variance);

        std::ostringstream text;
        write_text_report(text, report);
        const std::string t = text.str();
        CHECK(t.find("All") != std::string::npos);
        CHECK(t.find("in-kb") != std::string::npos);
        CHECK(t.find("out-of-kb") != std::string::npos);
        CHECK(t.find("MAP") != std::string::npos);
        CHECK(t.find("‡") != std::string::npos);
        CHECK(t.find("Configurations") != std::string::npos);

        std::ostringstream json;
        write_json_report(json, report);
        const auto doc = nlohmann::json::parse(json.str());
        CHECK(doc["blocks"].size() == 3);
        CHECK(doc["methods"].size() == 3);
        CHECK(doc["configurations"].size() == 3);
        CHECK(doc["methods"][1]["reference"] == "basic-n50-m50-semantic");
    }
    SUBCASE("explicit comparison") {
        const std::vector<Run> runs{run, run_of("other", {{"e1", ranked({"a"})}})};
        const auto report = evaluate_runs(runs, qrels, std::nullopt, std::string("sys"));
        CHECK(report.runs[1].reference == std::optional<std::string>("sys"));
        CHECK_THROWS_AS(evaluate_runs(runs, qrels, std::nullopt, std::string("nope")), UsageError);
        const std::vector<Run> twins{run, run};
        CHECK_THROWS_AS(evaluate_runs(twins, qrels), UsageError);
    }
}

TEST_CASE("partition parsing") {
    std::istringstream ok("e1 in-kb\ne2 out-of-kb\ne3 in-kb\n");
    const auto p = parse_partition(ok, "mem");
    CHECK(p.labels == std::vector<std::string>{"in-kb", "out-of-kb"});
    CHECK(p.label_of.at("e3") == "in-kb");
    std::istringstream reserved("e1 All\n");
    CHECK_THROWS_AS(parse_partition(reserved, "mem"), ParseError);
    std::istringstream twice("e1 a\ne1 b\n");
    CHECK_THROWS_AS(parse_partition(twice, "mem"), ParseError);
}

TEST_CASE("pooling") {
    std::vector<ScoredContext> first, second;
    for (int i = 0; i < 30; ++i) {
        first.push_back({"a" + std::to_string(100 + i), 1.0 / (i + 1)});
        second.push_back({"b" + std::to_string(100 + i), 1.0 / (i + 1)});
    }
    const Run r1 = run_of("r1", {{"e", first}});
    const Run r2 = run_of("r2", {{"e", second}});
    const Run r3 = run_of("r3", {{"e", first}});

    CHECK(pool_size(pool_top_k(std::vector<Run>{r1, r2}, 20)) == 40);
    CHECK(pool_size(pool_top_k(std::vector<Run>{r1, r3}, 20)) == 20);

    const std::vector<Run> runs{r1, r2, r3};
    Pool previous;
    for (std::size_t k = 1; k <= 35; ++k) {
        const auto pool = pool_top_k(runs, k);
        for (const auto& [entity, ids] : previous)
            CHECK(std::includes(pool.at(entity).begin(), pool.at(entity).end(), ids.begin(),
                                ids.end()));
        previous = pool;
    }

    std::ostringstream sheet;
    write_pool(sheet, pool_top_k(std::vector<Run>{r1}, 2));
    CHECK(sheet.str() == "e\ta100\t\ne\ta101\t\n");
}

}  // TEST_SUITE
