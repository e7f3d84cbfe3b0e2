// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tailrank Authors

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tailrank/datamodel.hpp"
#include "tailrank/ranking.hpp"

namespace tailrank {

/// Binary judgments for one entity: context id -> 0 or 1.
using Judgments = std::map<std::string, int>;

struct Qrels {
    std::map<std::string, Judgments> by_entity;

    /// Judgments for `entity_id`, or nullptr when the entity was never judged.
    const Judgments* find(const std::string& entity_id) const;
};

/// Lines `entity_id 0 context_id rel` with rel in {0, 1}.
Qrels parse_qrels(std::istream& in, const std::string& source);
Qrels load_qrels(const std::filesystem::path& path);
void write_qrels(std::ostream& out, const Qrels& qrels);

std::size_t relevant_count(const Judgments& judgments);

/// Mean of precision at the rank of each relevant context, divided by the
/// number of judged-relevant contexts R. Unjudged contexts count as
/// non-relevant; repeated context ids count at their first rank only.
/// Returns 0 when R == 0.
double average_precision(std::span<const ScoredContext> ranking, const Judgments& judgments);

/// 1 / rank of the first relevant context, 0 when none is retrieved.
double reciprocal_rank(std::span<const ScoredContext> ranking, const Judgments& judgments);

// ---------------------------------------------------------------------------
// Significance

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    std::size_t n = 0;
    /// Constant non-zero difference: zero variance, reported as p = 0.
    bool degenerate_variance = false;
};

/// Regularized incomplete beta function I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

/// Two-tailed p value of Student's t with `df` degrees of freedom.
double student_t_two_tailed_p(double t, double df);

/// Two-tailed paired t-test on per-entity scores. Throws UsageError when the
/// lists differ in length or hold fewer than two pairs.
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b);

inline constexpr double kSignificanceLevel = 0.05;
inline constexpr double kHighSignificanceLevel = 0.001;

/// "‡" at p < 0.001, "†" at p < 0.05, otherwise empty.
std::string significance_marker(double p);

// ---------------------------------------------------------------------------
// Evaluation

/// Entity -> subset label (e.g. in-KB / out-of-KB). Labels keep file order.
struct Partition {
    std::vector<std::string> labels;
    std::map<std::string, std::string> label_of;
};

/// Lines `entity_id label`.
Partition parse_partition(std::istream& in, const std::string& source);
Partition load_partition(const std::filesystem::path& path);

struct EntityScores {
    std::string entity_id;
    double ap = 0.0;
    double rr = 0.0;
    /// Entity judged but absent from the run; scored 0.
    bool missing_from_run = false;
    /// Entity has no judged-relevant context; scored 0.
    bool no_relevant = false;
};

struct RunEvaluation {
    std::string tag;
    /// One entry per judged entity, ascending entity id.
    std::vector<EntityScores> per_entity;
    /// Entities ranked by the run that have no judgments; not scored.
    std::vector<std::string> unjudged_entities;
};

RunEvaluation evaluate_run(const Run& run, const Qrels& qrels);

struct BlockMetrics {
    std::size_t entities = 0;
    double map = 0.0;
    double mrr = 0.0;
    /// Against the reference run, when one is assigned.
    std::optional<TTestResult> map_test;
    std::optional<TTestResult> mrr_test;
};

struct RunReport {
    std::string tag;
    /// Run this one is tested against, if any.
    std::optional<std::string> reference;
    /// Parallel to EvalReport::blocks.
    std::vector<BlockMetrics> blocks;
    RunEvaluation evaluation;
};

struct EvalReport {
    /// "All" followed by the partition labels.
    std::vector<std::string> blocks;
    std::vector<RunReport> runs;
};

/// Reference run per tag. With `compare_to`, every other run is tested
/// against it; otherwise pop and types grid runs are tested against the basic
/// run with the same N, M and CCR.
std::map<std::string, std::string> assign_references(const std::vector<std::string>& tags,
                                                     const std::optional<std::string>& compare_to);

/// Throws UsageError when two runs share a tag or `compare_to` names no run.
EvalReport evaluate_runs(std::span<const Run> runs, const Qrels& qrels,
                         const std::optional<Partition>& partition = std::nullopt,
                         const std::optional<std::string>& compare_to = std::nullopt);

/// Aligned plain-text report: a method table with one MAP/MRR column pair
/// per block, then a SER/N/M by CCR configuration table over grid runs.
void write_text_report(std::ostream& out, const EvalReport& report);
void write_json_report(std::ostream& out, const EvalReport& report);

// ---------------------------------------------------------------------------
// Pooling

/// Entity -> pooled context ids.
using Pool = std::map<std::string, std::set<std::string>>;

/// Union over runs of each entity's top-k contexts.
Pool pool_top_k(std::span<const Run> runs, std::size_t k);

std::size_t pool_size(const Pool& pool);

/// Assessment sheet, one `entity_id<TAB>context_id<TAB>text` line per pooled
/// pair in ascending (entity, context) order. Text is empty without a store.
void write_pool(std::ostream& out, const Pool& pool, const ContextStore* contexts = nullptr);

}  // namespace tailrank
