// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tailrank Authors

#include "tailrank/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include <json.hpp>

#include "tailrank/errors.hpp"
#include "tailrank/pipeline.hpp"

namespace tailrank {

// ---------------------------------------------------------------------------
// Qrels

const Judgments* Qrels::find(const std::string& entity_id) const {
    auto it = by_entity.find(entity_id);
    return it == by_entity.end() ? nullptr : &it->second;
}

Qrels parse_qrels(std::istream& in, const std::string& source) {
    Qrels qrels;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        std::string entity, iteration, context, rel, extra;
        if (!(fields >> entity >> iteration >> context >> rel) || (fields >> extra))
            throw ParseError(source, number, "expected 4 fields: entity 0 context rel");
        if (rel != "0" && rel != "1")
            throw ParseError(source, number, "relevance must be 0 or 1, got '" + rel + "'");
        const int value = rel == "1" ? 1 : 0;
        auto [it, inserted] = qrels.by_entity[entity].emplace(context, value);
        if (!inserted && it->second != value)
            throw ParseError(source, number,
                             "conflicting judgments for (" + entity + ", " + context + ")");
    }
    return qrels;
}

Qrels load_qrels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path.string() + "'");
    return parse_qrels(in, path.string());
}

void write_qrels(std::ostream& out, const Qrels& qrels) {
    for (const auto& [entity, judgments] : qrels.by_entity)
        for (const auto& [context, rel] : judgments)
            out << entity << " 0 " << context << ' ' << rel << '\n';
}

std::size_t relevant_count(const Judgments& judgments) {
    return static_cast<std::size_t>(std::count_if(
        judgments.begin(), judgments.end(), [](const auto& j) { return j.second > 0; }));
}

namespace {

// Unevaluated sum hi + lo carrying about 106 bits, so that precision sums
// round to the nearest double of their exact rational value.
struct DoubleDouble {
    double hi = 0.0;
    double lo = 0.0;

    static DoubleDouble quotient(double a, double b) {
        const double q = a / b;
        return {q, std::fma(-q, b, a) / b};
    }

    void add(const DoubleDouble& x) {
        const double s = hi + x.hi;
        const double v = s - hi;
        const double err = (hi - (s - v)) + (x.hi - v);
        const double low = err + lo + x.lo;
        hi = s + low;
        lo = low - (hi - s);
    }

    double divided_by(double d) const {
        const double q = hi / d;
        const double remainder = std::fma(-q, d, hi) + lo;
        return q + remainder / d;
    }
};

bool is_relevant(const Judgments& judgments, const std::string& context_id) {
    auto it = judgments.find(context_id);
    return it != judgments.end() && it->second > 0;
}

}  // namespace

double average_precision(std::span<const ScoredContext> ranking, const Judgments& judgments) {
    const std::size_t total_relevant = relevant_count(judgments);
    if (total_relevant == 0) return 0.0;
    std::unordered_set<std::string_view> seen;
    DoubleDouble sum;
    std::size_t rank = 0;
    std::size_t hits = 0;
    for (const auto& entry : ranking) {
        if (!seen.insert(entry.context_id).second) continue;
        ++rank;
        if (is_relevant(judgments, entry.context_id)) {
            ++hits;
            sum.add(DoubleDouble::quotient(static_cast<double>(hits), static_cast<double>(rank)));
        }
    }
    return sum.divided_by(static_cast<double>(total_relevant));
}

double reciprocal_rank(std::span<const ScoredContext> ranking, const Judgments& judgments) {
    std::unordered_set<std::string_view> seen;
    std::size_t rank = 0;
    for (const auto& entry : ranking) {
        if (!seen.insert(entry.context_id).second) continue;
        ++rank;
        if (is_relevant(judgments, entry.context_id)) return 1.0 / static_cast<double>(rank);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Significance

namespace {

// Continued fraction for the incomplete beta function, modified Lentz method.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 500;
    constexpr double kEpsilon = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEpsilon) break;
    }
    return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw UsageError("incomplete beta needs a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    // The continued fraction converges fastest below the mean of the distribution.
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_tailed_p(double t, double df) {
    if (!(df > 0.0)) throw UsageError("t distribution needs df > 0");
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return 0.0;
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw UsageError("paired t-test needs equal-length samples, got " +
                         std::to_string(a.size()) + " and " + std::to_string(b.size()));
    if (a.size() < 2) throw UsageError("paired t-test needs at least 2 pairs");

    TTestResult result;
    result.n = a.size();
    const double n = static_cast<double>(a.size());
    std::vector<double> diff(a.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff[i] = a[i] - b[i];
        sum += diff[i];
    }
    const double mean = sum / n;
    double squares = 0.0;
    for (double d : diff) squares += (d - mean) * (d - mean);
    const double sd = std::sqrt(squares / (n - 1.0));

    if (sd == 0.0) {
        if (mean == 0.0) {
            result.t = 0.0;
            result.p = 1.0;
        } else {
            result.t = std::copysign(std::numeric_limits<double>::infinity(), mean);
            result.p = 0.0;
            result.degenerate_variance = true;
        }
        return result;
    }
    result.t = mean / (sd / std::sqrt(n));
    result.p = student_t_two_tailed_p(result.t, n - 1.0);
    return result;
}

std::string significance_marker(double p) {
    if (p < kHighSignificanceLevel) return "‡";
    if (p < kSignificanceLevel) return "†";
    return "";
}

// ---------------------------------------------------------------------------
// Evaluation

Partition parse_partition(std::istream& in, const std::string& source) {
    Partition partition;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        std::string entity, label, extra;
        if (!(fields >> entity >> label) || (fields >> extra))
            throw ParseError(source, number, "expected 2 fields: entity label");
        if (label == "All") throw ParseError(source, number, "label 'All' is reserved");
        auto [it, inserted] = partition.label_of.emplace(entity, label);
        if (!inserted && it->second != label)
            throw ParseError(source, number, "entity '" + entity + "' assigned to two subsets");
        if (std::find(partition.labels.begin(), partition.labels.end(), label) ==
            partition.labels.end())
            partition.labels.push_back(label);
    }
    return partition;
}

Partition load_partition(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path.string() + "'");
    return parse_partition(in, path.string());
}

RunEvaluation evaluate_run(const Run& run, const Qrels& qrels) {
    RunEvaluation eval;
    eval.tag = run.tag;
    for (const auto& [entity, judgments] : qrels.by_entity) {
        EntityScores scores;
        scores.entity_id = entity;
        scores.no_relevant = relevant_count(judgments) == 0;
        auto it = run.by_entity.find(entity);
        if (it == run.by_entity.end()) {
            scores.missing_from_run = true;
        } else {
            scores.ap = average_precision(it->second, judgments);
            scores.rr = reciprocal_rank(it->second, judgments);
        }
        eval.per_entity.push_back(std::move(scores));
    }
    for (const auto& [entity, ranking] : run.by_entity)
        if (qrels.find(entity) == nullptr) eval.unjudged_entities.push_back(entity);
    return eval;
}

std::map<std::string, std::string> assign_references(const std::vector<std::string>& tags,
                                                     const std::optional<std::string>& compare_to) {
    std::map<std::string, std::string> refs;
    if (compare_to) {
        if (std::find(tags.begin(), tags.end(), *compare_to) == tags.end())
            throw UsageError("no run tagged '" + *compare_to + "' to compare against");
        for (const auto& tag : tags)
            if (tag != *compare_to) refs.emplace(tag, *compare_to);
        return refs;
    }
    for (const auto& tag : tags) {
        auto cfg = PipelineConfig::from_run_tag(tag);
        if (!cfg || cfg->ser == SerVariant::Basic) continue;
        PipelineConfig basic = *cfg;
        basic.ser = SerVariant::Basic;
        const auto basic_tag = basic.run_tag();
        if (std::find(tags.begin(), tags.end(), basic_tag) != tags.end())
            refs.emplace(tag, basic_tag);
    }
    return refs;
}

EvalReport evaluate_runs(std::span<const Run> runs, const Qrels& qrels,
                         const std::optional<Partition>& partition,
                         const std::optional<std::string>& compare_to) {
    EvalReport report;
    report.blocks.push_back("All");
    if (partition)
        report.blocks.insert(report.blocks.end(), partition->labels.begin(),
                             partition->labels.end());

    std::vector<std::string> tags;
    for (const auto& run : runs) {
        if (std::find(tags.begin(), tags.end(), run.tag) != tags.end())
            throw UsageError("two runs share the tag '" + run.tag + "'");
        tags.push_back(run.tag);
    }
    const auto references = assign_references(tags, compare_to);

    auto in_block = [&](const std::string& entity, std::size_t block) {
        if (block == 0) return true;
        auto it = partition->label_of.find(entity);
        return it != partition->label_of.end() && it->second == report.blocks[block];
    };

    for (const auto& run : runs) {
        RunReport rr;
        rr.tag = run.tag;
        rr.evaluation = evaluate_run(run, qrels);
        if (auto it = references.find(run.tag); it != references.end()) rr.reference = it->second;
        report.runs.push_back(std::move(rr));
    }

    for (auto& rr : report.runs) {
        const RunReport* reference = nullptr;
        if (rr.reference)
            for (const auto& other : report.runs)
                if (other.tag == *rr.reference) reference = &other;

        for (std::size_t block = 0; block < report.blocks.size(); ++block) {
            BlockMetrics metrics;
            std::vector<double> ap, rec, ref_ap, ref_rec;
            // Both evaluations list the same judged entities in the same order.
            for (std::size_t i = 0; i < rr.evaluation.per_entity.size(); ++i) {
                const auto& scores = rr.evaluation.per_entity[i];
                if (!in_block(scores.entity_id, block)) continue;
                ap.push_back(scores.ap);
                rec.push_back(scores.rr);
                if (reference) {
                    ref_ap.push_back(reference->evaluation.per_entity[i].ap);
                    ref_rec.push_back(reference->evaluation.per_entity[i].rr);
                }
            }
            metrics.entities = ap.size();
            if (!ap.empty()) {
                double ap_sum = 0.0;
                double rr_sum = 0.0;
                for (std::size_t i = 0; i < ap.size(); ++i) {
                    ap_sum += ap[i];
                    rr_sum += rec[i];
                }
                metrics.map = ap_sum / static_cast<double>(ap.size());
                metrics.mrr = rr_sum / static_cast<double>(ap.size());
            }
            if (reference && ap.size() >= 2) {
                metrics.map_test = paired_ttest(ap, ref_ap);
                metrics.mrr_test = paired_ttest(rec, ref_rec);
            }
            rr.blocks.push_back(std::move(metrics));
        }
    }
    return report;
}

namespace {

std::size_t display_width(const std::string& s) {
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

std::string pad(const std::string& s, std::size_t width, bool right_align) {
    const std::size_t w = display_width(s);
    if (w >= width) return s;
    const std::string fill(width - w, ' ');
    return right_align ? fill + s : s + fill;
}

std::string metric_cell(double value, const std::optional<TTestResult>& test) {
    std::ostringstream cell;
    cell.setf(std::ios::fixed);
    cell.precision(4);
    cell << value;
    return cell.str() + (test ? significance_marker(test->p) : std::string());
}

void write_table(std::ostream& out, const std::vector<std::vector<std::string>>& rows,
                 std::size_t left_columns) {
    if (rows.empty()) return;
    std::vector<std::size_t> widths(rows.front().size(), 0);
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c)
            widths[c] = std::max(widths[c], display_width(row[c]));
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) line += "  ";
            line += pad(row[c], widths[c], c >= left_columns);
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out << line << '\n';
    }
}

struct GridKey {
    SerVariant ser;
    std::size_t n;
    std::size_t m;
    auto operator<=>(const GridKey&) const = default;
};

}  // namespace

void write_text_report(std::ostream& out, const EvalReport& report) {
    out << "Methods (MAP / MRR per entity block; † p<0.05, ‡ p<0.001, two-tailed paired t-test)\n";
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"Run", "Reference"};
    std::vector<std::string> sub{"", ""};
    for (std::size_t b = 0; b < report.blocks.size(); ++b) {
        header.push_back(report.blocks[b]);
        header.push_back("");
        sub.push_back("MAP");
        sub.push_back("MRR");
    }
    rows.push_back(header);
    rows.push_back(sub);
    for (const auto& run : report.runs) {
        std::vector<std::string> row{run.tag, run.reference.value_or("-")};
        for (const auto& block : run.blocks) {
            row.push_back(metric_cell(block.map, block.map_test));
            row.push_back(metric_cell(block.mrr, block.mrr_test));
        }
        rows.push_back(std::move(row));
    }
    write_table(out, rows, 2);

    std::vector<std::string> entity_counts;
    for (std::size_t b = 0; b < report.blocks.size(); ++b) {
        const std::size_t n = report.runs.empty() ? 0 : report.runs.front().blocks[b].entities;
        entity_counts.push_back(report.blocks[b] + "=" + std::to_string(n));
    }
    out << "Entities:";
    for (const auto& c : entity_counts) out << ' ' << c;
    out << '\n';

    std::map<GridKey, std::map<CcrVariant, const RunReport*>> grid;
    for (const auto& run : report.runs)
        if (auto cfg = PipelineConfig::from_run_tag(run.tag))
            grid[{cfg->ser, cfg->n, cfg->m}][cfg->ccr] = &run;
    if (!grid.empty()) {
        out << "\nConfigurations (All entities; pop/types tested against basic)\n";
        std::vector<std::vector<std::string>> table;
        table.push_back({"ser", "N", "M", "semantic", "", "retrieval", ""});
        table.push_back({"", "", "", "MAP", "MRR", "MAP", "MRR"});
        std::optional<SerVariant> previous;
        for (const auto& [key, cells] : grid) {
            std::vector<std::string> row{
                previous == key.ser ? "" : std::string(to_string(key.ser)),
                std::to_string(key.n), std::to_string(key.m)};
            previous = key.ser;
            for (auto ccr : {CcrVariant::Semantic, CcrVariant::Retrieval}) {
                auto it = cells.find(ccr);
                if (it == cells.end()) {
                    row.push_back("-");
                    row.push_back("-");
                    continue;
                }
                const auto& all = it->second->blocks.front();
                row.push_back(metric_cell(all.map, all.map_test));
                row.push_back(metric_cell(all.mrr, all.mrr_test));
            }
            table.push_back(std::move(row));
        }
        write_table(out, table, 1);
    }

    bool any_flag = false;
    for (const auto& run : report.runs) {
        std::vector<std::string> notes;
        for (const auto& e : run.evaluation.per_entity) {
            if (e.missing_from_run) notes.push_back(e.entity_id + ": missing from run, scored 0");
            if (e.no_relevant) notes.push_back(e.entity_id + ": no relevant judgments, scored 0");
        }
        for (const auto& e : run.evaluation.unjudged_entities)
            notes.push_back(e + ": ranked but not judged, excluded");
        for (const auto& block : run.blocks)
            if ((block.map_test && block.map_test->degenerate_variance) ||
                (block.mrr_test && block.mrr_test->degenerate_variance)) {
                notes.push_back("zero-variance paired differences, p reported as 0");
                break;
            }
        if (notes.empty()) continue;
        if (!any_flag) out << "\nFlags\n";
        any_flag = true;
        for (const auto& note : notes) out << "  " << run.tag << "  " << note << '\n';
    }
}

namespace {

nlohmann::json test_json(const std::optional<TTestResult>& test) {
    if (!test) return nullptr;
    nlohmann::json j = {{"n", test->n},
                        {"p", test->p},
                        {"marker", significance_marker(test->p)},
                        {"degenerate_variance", test->degenerate_variance}};
    // JSON has no infinity.
    if (std::isfinite(test->t)) {
        j["t"] = test->t;
    } else {
        j["t"] = test->t > 0 ? "inf" : "-inf";
    }
    return j;
}

nlohmann::json block_json(const BlockMetrics& block) {
    return {{"entities", block.entities},
            {"MAP", block.map},
            {"MRR", block.mrr},
            {"MAP_marker", block.map_test ? significance_marker(block.map_test->p) : ""},
            {"MRR_marker", block.mrr_test ? significance_marker(block.mrr_test->p) : ""},
            {"MAP_test", test_json(block.map_test)},
            {"MRR_test", test_json(block.mrr_test)}};
}

}  // namespace

void write_json_report(std::ostream& out, const EvalReport& report) {
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["blocks"] = report.blocks;

    ordered_json methods = ordered_json::array();
    for (const auto& run : report.runs) {
        ordered_json row;
        row["run"] = run.tag;
        row["reference"] = run.reference ? ordered_json(*run.reference) : ordered_json(nullptr);
        ordered_json blocks = ordered_json::object();
        for (std::size_t b = 0; b < report.blocks.size(); ++b)
            blocks[report.blocks[b]] = block_json(run.blocks[b]);
        row["blocks"] = std::move(blocks);
        ordered_json entities = ordered_json::array();
        for (const auto& e : run.evaluation.per_entity) {
            ordered_json flags = ordered_json::array();
            if (e.missing_from_run) flags.push_back("missing_from_run");
            if (e.no_relevant) flags.push_back("no_relevant");
            entities.push_back(
                {{"entity", e.entity_id}, {"AP", e.ap}, {"RR", e.rr}, {"flags", flags}});
        }
        row["per_entity"] = std::move(entities);
        row["unjudged_entities"] = run.evaluation.unjudged_entities;
        methods.push_back(std::move(row));
    }
    doc["methods"] = std::move(methods);

    std::map<GridKey, std::map<CcrVariant, const RunReport*>> grid;
    for (const auto& run : report.runs)
        if (auto cfg = PipelineConfig::from_run_tag(run.tag))
            grid[{cfg->ser, cfg->n, cfg->m}][cfg->ccr] = &run;
    ordered_json configurations = ordered_json::array();
    for (const auto& [key, cells] : grid) {
        ordered_json row;
        row["ser"] = to_string(key.ser);
        row["N"] = key.n;
        row["M"] = key.m;
        for (auto ccr : {CcrVariant::Semantic, CcrVariant::Retrieval}) {
            auto it = cells.find(ccr);
            row[std::string(to_string(ccr))] =
                it == cells.end() ? ordered_json(nullptr)
                                  : ordered_json(block_json(it->second->blocks.front()));
        }
        configurations.push_back(std::move(row));
    }
    doc["configurations"] = std::move(configurations);
    out << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Pooling

Pool pool_top_k(std::span<const Run> runs, std::size_t k) {
    Pool pool;
    for (const auto& run : runs)
        for (const auto& [entity, ranking] : run.by_entity) {
            auto& pooled = pool[entity];
            const std::size_t depth = std::min(k, ranking.size());
            for (std::size_t i = 0; i < depth; ++i) pooled.insert(ranking[i].context_id);
        }
    return pool;
}

std::size_t pool_size(const Pool& pool) {
    std::size_t n = 0;
    for (const auto& [entity, contexts] : pool) n += contexts.size();
    return n;
}

void write_pool(std::ostream& out, const Pool& pool, const ContextStore* contexts) {
    for (const auto& [entity, ids] : pool)
        for (const auto& id : ids) {
            std::string text;
            if (contexts != nullptr)
                if (const Context* c = contexts->find(id)) text = c->text;
            std::replace(text.begin(), text.end(), '\t', ' ');
            std::replace(text.begin(), text.end(), '\n', ' ');
            out << entity << '\t' << id << '\t' << text << '\n';
        }
}

}  // namespace tailrank
