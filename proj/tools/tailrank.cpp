// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tailrank Authors

// Command-line front end: index, rank, baseline, pool, eval.
//
// Exit codes: 0 success, 1 refused or failed operation, 2 usage or input error.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include <boost/crc.hpp>
#include <CLI11.hpp>
#include <json.hpp>

#include "tailrank/baselines.hpp"
#include "tailrank/datamodel.hpp"
#include "tailrank/embeddings.hpp"
#include "tailrank/errors.hpp"
#include "tailrank/evalkit.hpp"
#include "tailrank/pipeline.hpp"
#include "tailrank/ranking.hpp"
#include "tailrank/textindex.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRefused = 1;
constexpr int kExitUsage = 2;
constexpr const char* kDataDirEnv = "TAILRANK_DATA_DIR";

/// An operation the tool declines to perform (exit 1).
class Refusal : public tailrank::Error {
public:
    using Error::Error;
};

/// Relative input paths missing from the working directory are looked up
/// under $TAILRANK_DATA_DIR.
fs::path resolve_input(const std::string& raw) {
    fs::path path(raw);
    if (path.is_relative() && !fs::exists(path))
        if (const char* dir = std::getenv(kDataDirEnv); dir != nullptr && *dir != '\0')
            if (fs::path candidate = fs::path(dir) / path; fs::exists(candidate)) return candidate;
    if (!fs::exists(path)) throw tailrank::UsageError("no such file: '" + raw + "'");
    return path;
}

std::optional<fs::path> resolve_optional(const std::string& raw) {
    if (raw.empty()) return std::nullopt;
    return resolve_input(raw);
}

/// Writes through a temporary file in the target directory, then renames.
void write_atomically(const fs::path& path, const std::function<void(std::ostream&)>& fill) {
    if (path.has_parent_path() && !fs::exists(path.parent_path()))
        throw tailrank::UsageError("output directory does not exist: '" +
                                   path.parent_path().string() + "'");
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw tailrank::UsageError("cannot write '" + path.string() + "'");
        fill(out);
        out.flush();
        if (!out) {
            std::error_code ignored;
            fs::remove(tmp, ignored);
            throw tailrank::Error("write failed for '" + path.string() + "'");
        }
    }
    fs::rename(tmp, path);
}

std::string crc32_hex(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    boost::crc_32_type crc;
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        crc.process_bytes(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::ostringstream hex;
    hex << std::hex << std::setw(8) << std::setfill('0') << crc.checksum();
    return hex.str();
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

/// Per-input path and CRC-32, plus one checksum over all of them.
ordered_json input_manifest(const std::vector<std::pair<std::string, fs::path>>& inputs) {
    ordered_json files = ordered_json::object();
    boost::crc_32_type combined;
    for (const auto& [role, path] : inputs) {
        const std::string crc = crc32_hex(path);
        files[role] = {{"path", path.string()}, {"crc32", crc}};
        combined.process_bytes(role.data(), role.size());
        combined.process_bytes(crc.data(), crc.size());
    }
    std::ostringstream hex;
    hex << std::hex << std::setw(8) << std::setfill('0') << combined.checksum();
    return {{"files", std::move(files)}, {"checksum", hex.str()}};
}

ordered_json config_json(const tailrank::PipelineConfig& cfg) {
    return {{"ser", tailrank::to_string(cfg.ser)},
            {"N", cfg.n},
            {"M", cfg.m},
            {"ccr", tailrank::to_string(cfg.ccr)},
            {"theta", cfg.theta},
            {"k1", cfg.bm25.k1},
            {"b", cfg.bm25.b},
            {"candidate_cap", cfg.candidate_cap},
            {"ser_depth", cfg.ser_depth}};
}

/// Runs `work(i)` for i in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& work) {
    jobs = std::max<std::size_t>(1, std::min(jobs, count));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) work(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> workers;
        for (std::size_t t = 0; t < jobs; ++t)
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        work(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
    }
    if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// index

struct IndexOptions {
    std::string catalog;
    std::string contexts;
    std::string out;
    bool force = false;
};

int cmd_index(const IndexOptions& opt) {
    const fs::path out(opt.out);
    if (fs::exists(out) && !opt.force)
        throw Refusal("'" + opt.out + "' exists; pass --force to rebuild");

    std::vector<std::pair<std::string, std::string>> docs;
    if (!opt.catalog.empty()) {
        const auto catalog = tailrank::load_catalog(resolve_input(opt.catalog));
        for (const auto& e : catalog.entities()) docs.emplace_back(e.id, e.opening_text);
    } else {
        const auto store = tailrank::load_contexts(resolve_input(opt.contexts));
        for (const auto& c : store.contexts()) docs.emplace_back(c.context_id, c.text);
    }
    const auto index = tailrank::InvertedIndex::build(std::move(docs));
    write_atomically(out, [&](std::ostream& os) { index.save(os); });
    std::cout << "documents " << index.doc_count() << '\n'
              << "terms " << index.term_count() << '\n'
              << "average_length " << tailrank::format_score(index.average_doc_length()) << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// rank

struct RankOptions {
    std::string entities;
    std::string catalog;
    std::string catalog_index;
    std::string contexts;
    std::string annotations;
    std::string embeddings;
    std::string ser = "basic";
    std::size_t n = 50;
    std::size_t m = 50;
    std::string ccr = "semantic";
    double theta = 0.9;
    double k1 = 1.2;
    double b = 0.8;
    std::size_t cap = tailrank::kDefaultCandidateCap;
    std::size_t ser_depth = 200;
    std::string tag;
    bool grid = false;
    std::size_t jobs = 1;
    std::string out;
};

ordered_json diagnostics_json(const std::string& entity_id,
                              const tailrank::RankingDiagnostics& d) {
    ordered_json flags = ordered_json::array();
    if (d.empty_support) flags.push_back("empty_support");
    if (d.skipped_support_entities > 0) flags.push_back("skipped_support_entities");
    if (d.zero_denominator_contexts > 0) flags.push_back("zero_denominator_contexts");
    if (d.truncated_candidates > 0) flags.push_back("candidates_truncated");
    if (d.candidates == 0) flags.push_back("no_candidates");
    return {{"entity", entity_id},
            {"candidates", d.candidates},
            {"truncated_candidates", d.truncated_candidates},
            {"support_entities", d.support_entities},
            {"support_entities_used", d.support_entities_used},
            {"skipped_support_entities", d.skipped_support_entities},
            {"support_contexts", d.support_contexts},
            {"zero_denominator_contexts", d.zero_denominator_contexts},
            {"total_mass", d.total_mass},
            {"lost_mass", d.lost_mass},
            {"flags", std::move(flags)}};
}

int cmd_rank(const RankOptions& opt) {
    const fs::path entities_path = resolve_input(opt.entities);
    const fs::path catalog_path = resolve_input(opt.catalog);
    const fs::path contexts_path = resolve_input(opt.contexts);
    const fs::path annotations_path = resolve_input(opt.annotations);
    const auto embeddings_path = resolve_optional(opt.embeddings);
    const auto catalog_index_path = resolve_optional(opt.catalog_index);

    tailrank::PipelineConfig base;
    base.ser = *tailrank::parse_ser_variant(opt.ser);
    base.n = opt.n;
    base.m = opt.m;
    base.ccr = *tailrank::parse_ccr_variant(opt.ccr);
    base.theta = opt.theta;
    base.bm25 = {opt.k1, opt.b};
    base.candidate_cap = opt.cap;
    base.ser_depth = opt.ser_depth;
    base.validate();

    std::vector<tailrank::PipelineConfig> configs =
        opt.grid ? tailrank::configuration_grid(base) : std::vector{base};
    const bool needs_embeddings = std::any_of(configs.begin(), configs.end(), [](const auto& c) {
        return c.ccr == tailrank::CcrVariant::Semantic;
    });
    if (needs_embeddings && !embeddings_path)
        throw tailrank::UsageError("semantic CCR requires --embeddings");
    if (opt.grid && !opt.tag.empty())
        throw tailrank::UsageError("--tag cannot be combined with --grid");

    const fs::path out(opt.out);
    if (opt.grid) {
        if (fs::exists(out) && !fs::is_directory(out))
            throw tailrank::UsageError("--grid writes into a directory; '" + opt.out +
                                       "' is not one");
        fs::create_directories(out);
    }

    const auto entities = tailrank::load_entities(entities_path);
    const auto catalog = tailrank::load_catalog(catalog_path);
    const auto contexts = tailrank::load_contexts(contexts_path);
    const auto annotations = tailrank::load_annotations(annotations_path, base.theta);
    std::optional<tailrank::EmbeddingTable> embeddings;
    if (needs_embeddings) {
        embeddings = tailrank::load_embeddings(*embeddings_path);
        for (const auto& w : embeddings->warnings()) std::cerr << "warning: " << w << '\n';
    }
    const auto catalog_index = catalog_index_path
                                   ? tailrank::InvertedIndex::load(*catalog_index_path)
                                   : tailrank::build_catalog_index(catalog);
    if (catalog_index.doc_count() != catalog.size())
        throw tailrank::IntegrityError("catalog index does not match the catalog");

    std::vector<tailrank::ContextSet> candidates;
    candidates.reserve(entities.size());
    for (const auto& e : entities)
        candidates.push_back(tailrank::gather_candidate_contexts(e, contexts, base.candidate_cap));

    std::vector<std::pair<std::string, fs::path>> inputs{{"entities", entities_path},
                                                         {"catalog", catalog_path},
                                                         {"contexts", contexts_path},
                                                         {"annotations", annotations_path}};
    if (embeddings_path) inputs.emplace_back("embeddings", *embeddings_path);
    if (catalog_index_path) inputs.emplace_back("catalog_index", *catalog_index_path);
    const ordered_json input_info = input_manifest(inputs);

    const tailrank::Stores stores{catalog, catalog_index, contexts, annotations,
                                  embeddings ? &*embeddings : nullptr};

    for (const auto& cfg : configs) {
        const std::string tag = opt.tag.empty() ? cfg.run_tag() : opt.tag;
        std::vector<tailrank::ScoredRanking> results(entities.size());
        parallel_for(entities.size(), opt.jobs, [&](std::size_t i) {
            results[i] = tailrank::score_contexts(entities[i], candidates[i], stores, cfg);
            results[i].ranking.run_tag = tag;
        });

        std::vector<tailrank::ContextRanking> rankings;
        ordered_json diagnostics = ordered_json::array();
        for (std::size_t i = 0; i < results.size(); ++i) {
            diagnostics.push_back(diagnostics_json(entities[i].id, results[i].diagnostics));
            rankings.push_back(std::move(results[i].ranking));
        }

        const fs::path run_path = opt.grid ? out / (tag + ".run") : out;
        write_atomically(run_path, [&](std::ostream& os) { tailrank::write_run(os, rankings); });

        ordered_json manifest;
        manifest["run_tag"] = tag;
        manifest["config"] = config_json(cfg);
        manifest["inputs"] = input_info;
        manifest["output"] = run_path.string();
        manifest["entities"] = std::move(diagnostics);
        manifest["created_at"] = utc_timestamp();
        fs::path manifest_path = run_path;
        manifest_path += ".manifest.json";
        write_atomically(manifest_path,
                         [&](std::ostream& os) { os << manifest.dump(2) << '\n'; });
        std::cout << tag << " -> " << run_path.string() << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// baseline

struct BaselineOptions {
    std::string method = "bm25";
    std::string entities;
    std::string contexts;
    std::string annotations;
    double theta = 0.6;
    double k1 = 1.2;
    double b = 0.8;
    std::size_t cap = tailrank::kDefaultCandidateCap;
    std::string tag;
    std::size_t jobs = 1;
    std::string out;
};

int cmd_baseline(const BaselineOptions& opt) {
    const fs::path entities_path = resolve_input(opt.entities);
    const fs::path contexts_path = resolve_input(opt.contexts);
    const bool linker = opt.method == "linker";
    std::optional<fs::path> annotations_path;
    if (linker) {
        if (opt.annotations.empty())
            throw tailrank::UsageError("the linker baseline requires --annotations");
        annotations_path = resolve_input(opt.annotations);
        if (!(opt.theta >= 0.0 && opt.theta <= 1.0))
            throw tailrank::UsageError("--theta must be in [0,1]");
    }
    const tailrank::Bm25Params params{opt.k1, opt.b};
    params.validate();
    if (opt.cap < 1) throw tailrank::UsageError("--cap must be >= 1");

    const auto entities = tailrank::load_entities(entities_path);
    const auto contexts = tailrank::load_contexts(contexts_path);
    std::optional<tailrank::AnnotationStore> annotations;
    if (annotations_path) annotations = tailrank::load_annotations(*annotations_path, 0.0);

    std::vector<tailrank::ContextRanking> rankings(entities.size());
    parallel_for(entities.size(), opt.jobs, [&](std::size_t i) {
        const auto candidates = tailrank::gather_candidate_contexts(entities[i], contexts, opt.cap);
        rankings[i] = linker ? tailrank::linker_baseline(entities[i], candidates, *annotations,
                                                         opt.theta)
                             : tailrank::sentence_retrieval_baseline(entities[i], candidates,
                                                                     params);
        if (!opt.tag.empty()) rankings[i].run_tag = opt.tag;
    });
    write_atomically(fs::path(opt.out),
                     [&](std::ostream& os) { tailrank::write_run(os, rankings); });

    std::vector<std::pair<std::string, fs::path>> inputs{{"entities", entities_path},
                                                         {"contexts", contexts_path}};
    if (annotations_path) inputs.emplace_back("annotations", *annotations_path);
    ordered_json manifest;
    manifest["run_tag"] = rankings.empty() ? opt.tag : rankings.front().run_tag;
    manifest["baseline"] = opt.method;
    manifest["config"] = linker ? ordered_json{{"theta", opt.theta}, {"candidate_cap", opt.cap}}
                                : ordered_json{{"k1", opt.k1}, {"b", opt.b},
                                               {"candidate_cap", opt.cap}};
    manifest["inputs"] = input_manifest(inputs);
    manifest["output"] = opt.out;
    manifest["created_at"] = utc_timestamp();
    write_atomically(fs::path(opt.out + ".manifest.json"),
                     [&](std::ostream& os) { os << manifest.dump(2) << '\n'; });
    return kExitOk;
}

// ---------------------------------------------------------------------------
// pool, eval

std::vector<tailrank::Run> load_runs(const std::vector<std::string>& paths) {
    std::vector<tailrank::Run> runs;
    for (const auto& p : paths) runs.push_back(tailrank::load_run(resolve_input(p)));
    return runs;
}

struct PoolOptions {
    std::size_t k = 20;
    std::string contexts;
    std::string out;
    std::vector<std::string> runs;
};

int cmd_pool(const PoolOptions& opt) {
    if (opt.k < 1) throw tailrank::UsageError("--k must be >= 1");
    const auto runs = load_runs(opt.runs);
    std::optional<tailrank::ContextStore> contexts;
    if (!opt.contexts.empty()) contexts = tailrank::load_contexts(resolve_input(opt.contexts));
    const auto pool = tailrank::pool_top_k(runs, opt.k);
    write_atomically(fs::path(opt.out), [&](std::ostream& os) {
        tailrank::write_pool(os, pool, contexts ? &*contexts : nullptr);
    });
    std::cout << "runs " << runs.size() << '\n'
              << "entities " << pool.size() << '\n'
              << "pooled " << tailrank::pool_size(pool) << '\n';
    return kExitOk;
}

struct EvalOptions {
    std::string qrels;
    std::string subset;
    std::string compare_to;
    std::string json;
    std::string out;
    std::vector<std::string> runs;
};

int cmd_eval(const EvalOptions& opt) {
    const auto qrels = tailrank::load_qrels(resolve_input(opt.qrels));
    std::optional<tailrank::Partition> partition;
    if (!opt.subset.empty()) partition = tailrank::load_partition(resolve_input(opt.subset));
    const auto runs = load_runs(opt.runs);
    std::optional<std::string> compare_to;
    if (!opt.compare_to.empty()) compare_to = opt.compare_to;

    const auto report = tailrank::evaluate_runs(runs, qrels, partition, compare_to);
    if (opt.out.empty()) {
        tailrank::write_text_report(std::cout, report);
    } else {
        write_atomically(fs::path(opt.out),
                         [&](std::ostream& os) { tailrank::write_text_report(os, report); });
    }
    if (!opt.json.empty())
        write_atomically(fs::path(opt.json),
                         [&](std::ostream& os) { tailrank::write_json_report(os, report); });
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rank sentences mentioning long-tail entities using support entities and "
                 "support contexts; run baselines, pool and evaluate."};
    app.require_subcommand(1);

    IndexOptions index_opt;
    auto* index = app.add_subcommand("index", "Build and snapshot a BM25 index");
    auto* index_source = index->add_option_group("source");
    index_source->add_option("--catalog", index_opt.catalog, "catalog.jsonl (opening text)");
    index_source->add_option("--contexts", index_opt.contexts, "contexts.jsonl (sentence text)");
    index_source->require_option(1);
    index->add_option("--out", index_opt.out, "Snapshot path")->required();
    index->add_flag("--force", index_opt.force, "Overwrite an existing snapshot");

    RankOptions rank_opt;
    auto* rank = app.add_subcommand("rank", "Score candidate contexts for every entity");
    rank->add_option("--entities", rank_opt.entities, "entities.jsonl")->required();
    rank->add_option("--catalog", rank_opt.catalog, "catalog.jsonl")->required();
    rank->add_option("--catalog-index", rank_opt.catalog_index,
                     "Prebuilt catalog index snapshot");
    rank->add_option("--contexts", rank_opt.contexts, "contexts.jsonl")->required();
    rank->add_option("--annotations", rank_opt.annotations, "annotations.jsonl")->required();
    rank->add_option("--embeddings", rank_opt.embeddings, "Word vectors, text format");
    rank->add_option("--ser", rank_opt.ser, "Support entity ranking")
        ->check(CLI::IsMember({"basic", "pop", "types"}))
        ->capture_default_str();
    rank->add_option("--n", rank_opt.n, "Support entities kept")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    rank->add_option("--m", rank_opt.m, "Support contexts per support entity")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    rank->add_option("--ccr", rank_opt.ccr, "Context-to-context ranking")
        ->check(CLI::IsMember({"retrieval", "semantic"}))
        ->capture_default_str();
    rank->add_option("--theta", rank_opt.theta, "Link confidence threshold")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    rank->add_option("--k1", rank_opt.k1, "BM25 k1")->capture_default_str();
    rank->add_option("--b", rank_opt.b, "BM25 b")->capture_default_str();
    rank->add_option("--cap", rank_opt.cap, "Candidate contexts per entity")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    rank->add_option("--ser-depth", rank_opt.ser_depth, "Support entities retrieved")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    rank->add_option("--tag", rank_opt.tag, "Run tag (default encodes the configuration)");
    rank->add_flag("--grid", rank_opt.grid,
                   "Run all 24 SER x N x M x CCR configurations into the --out directory");
    rank->add_option("--jobs", rank_opt.jobs, "Entities scored in parallel")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    rank->add_option("--out", rank_opt.out, "Run file, or directory with --grid")->required();

    BaselineOptions base_opt;
    auto* baseline = app.add_subcommand("baseline", "Rank contexts with a baseline");
    baseline->add_option("--method", base_opt.method, "bm25 sentence retrieval or linker")
        ->check(CLI::IsMember({"bm25", "linker"}))
        ->capture_default_str();
    baseline->add_option("--entities", base_opt.entities, "entities.jsonl")->required();
    baseline->add_option("--contexts", base_opt.contexts, "contexts.jsonl")->required();
    baseline->add_option("--annotations", base_opt.annotations, "annotations.jsonl (linker)");
    baseline->add_option("--theta", base_opt.theta, "Linker confidence threshold")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    baseline->add_option("--k1", base_opt.k1, "BM25 k1")->capture_default_str();
    baseline->add_option("--b", base_opt.b, "BM25 b")->capture_default_str();
    baseline->add_option("--cap", base_opt.cap, "Candidate contexts per entity")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    baseline->add_option("--tag", base_opt.tag, "Run tag");
    baseline->add_option("--jobs", base_opt.jobs, "Entities scored in parallel")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    baseline->add_option("--out", base_opt.out, "Run file")->required();

    PoolOptions pool_opt;
    auto* pool = app.add_subcommand("pool", "Pool the top-k contexts of several runs");
    pool->add_option("--k", pool_opt.k, "Depth per run")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    pool->add_option("--contexts", pool_opt.contexts, "contexts.jsonl, to include sentence text");
    pool->add_option("--out", pool_opt.out, "Assessment sheet (TSV)")->required();
    pool->add_option("runs", pool_opt.runs, "Run files")->required();

    EvalOptions eval_opt;
    auto* eval = app.add_subcommand("eval", "MAP/MRR with paired t-tests");
    eval->add_option("--qrels", eval_opt.qrels, "Judgments: entity 0 context rel")->required();
    eval->add_option("--subset", eval_opt.subset, "Entity partition: entity label");
    eval->add_option("--compare-to", eval_opt.compare_to,
                     "Test every run against this run tag (default: pop/types vs basic)");
    eval->add_option("--json", eval_opt.json, "Also write a JSON report");
    eval->add_option("--out", eval_opt.out, "Write the text report here instead of stdout");
    eval->add_option("runs", eval_opt.runs, "Run files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (index->parsed()) return cmd_index(index_opt);
        if (rank->parsed()) return cmd_rank(rank_opt);
        if (baseline->parsed()) return cmd_baseline(base_opt);
        if (pool->parsed()) return cmd_pool(pool_opt);
        if (eval->parsed()) return cmd_eval(eval_opt);
    } catch (const Refusal& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return kExitRefused;
    } catch (const tailrank::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const tailrank::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const tailrank::IntegrityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "failed: " << e.what() << '\n';
        return kExitRefused;
    }
    return kExitUsage;
}
