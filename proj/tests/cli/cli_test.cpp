// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tailrank Authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kFixture = TAILRANK_FIXTURE_DIR;

struct Result {
    int code = -1;
    std::string output;
};

class Workspace {
public:
    Workspace() {
        std::random_device rd;
        dir_ = fs::temp_directory_path() / ("tailrank-cli-" + std::to_string(rd()));
        fs::create_directories(dir_);
    }
    ~Workspace() {
        std::error_code ec;
        fs::remove_all(dir_, ec);
    }
    fs::path operator/(const std::string& name) const { return dir_ / name; }

    Result run(const std::string& args) const {
        const auto log = dir_ / "cli.log";
        const std::string command =
            std::string("'") + TAILRANK_BIN + "' " + args + " > '" + log.string() + "' 2>&1";
        const int status = std::system(command.c_str());
        Result r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        std::ifstream in(log);
        r.output.assign(std::istreambuf_iterator<char>(in), {});
        return r;
    }

private:
    fs::path dir_;
};

std::string fixture(const std::string& name) { return "'" + kFixture + "/" + name + "'"; }

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::string stores() {
    return " --entities " + fixture("entities.jsonl") + " --catalog " + fixture("catalog.jsonl") +
           " --contexts " + fixture("contexts.jsonl") + " --annotations " +
           fixture("annotations.jsonl") + " --embeddings " + fixture("embeddings.txt");
}

}  // namespace

TEST_CASE("index") {
    Workspace ws;
    const auto out = ws / "catalog.idx";
    auto r = ws.run("index --catalog " + fixture("catalog.jsonl") + " --out '" + out.string() + "'");
    CHECK(r.code == 0);
    CHECK(fs::exists(out));
    CHECK(r.output.find("9") != std::string::npos);

    r = ws.run("index --catalog " + fixture("catalog.jsonl") + " --out '" + out.string() + "'");
    CHECK(r.code == 1);
    CHECK(r.output.find("--force") != std::string::npos);

    r = ws.run("index --catalog " + fixture("catalog.jsonl") + " --out '" + out.string() +
               "' --force");
    CHECK(r.code == 0);

    r = ws.run("index --catalog '" + (ws / "missing.jsonl").string() + "' --out '" +
               (ws / "x.idx").string() + "'");
    CHECK(r.code == 2);
    CHECK_FALSE(r.output.empty());
    CHECK_FALSE(fs::exists(ws / "x.idx"));
}

TEST_CASE("rank") {
    Workspace ws;
    SUBCASE("best configuration tag and manifest") {
        const auto out = ws / "best.run";
        const auto r = ws.run("rank" + stores() +
                              " --ser basic --n 50 --m 50 --ccr semantic --out '" + out.string() + "'");
        REQUIRE(r.code == 0);
        const auto text = slurp(out);
        CHECK(text.find(" basic-n50-m50-semantic\n") != std::string::npos);
        CHECK(text.find("isai-vc Q0 ") != std::string::npos);
        CHECK(text.find("Isai_(record_label) Q0 ") != std::string::npos);

        const auto manifest = nlohmann::json::parse(slurp(out.string() + ".manifest.json"));
        CHECK(manifest["run_tag"] == "basic-n50-m50-semantic");
        CHECK(manifest.contains("config"));
    }
    SUBCASE("invalid enum value") {
        const auto r = ws.run("rank" + stores() + " --ser fancy --out '" +
                              (ws / "bad.run").string() + "'");
        CHECK(r.code == 2);
        CHECK(r.output.find("basic") != std::string::npos);
        CHECK(r.output.find("types") != std::string::npos);
    }
    SUBCASE("grid runs are deterministic") {
        const auto first = ws / "grid1";
        const auto second = ws / "grid2";
        REQUIRE(ws.run("rank" + stores() + " --grid --jobs 3 --out '" + first.string() + "'").code == 0);
        REQUIRE(ws.run("rank" + stores() + " --grid --jobs 1 --out '" + second.string() + "'").code == 0);
        std::size_t runs = 0;
        for (const auto& entry : fs::directory_iterator(first)) {
            if (entry.path().extension() != ".run") continue;
            ++runs;
            CHECK(slurp(entry.path()) == slurp(second / entry.path().filename()));
        }
        CHECK(runs == 24);
    }
}

TEST_CASE("baselines, pooling and evaluation") {
    Workspace ws;
    const auto grid = ws / "grid";
    REQUIRE(ws.run("rank" + stores() + " --grid --out '" + grid.string() + "'").code == 0);
    const auto bm25 = ws / "bm25.run";
    const auto linker = ws / "linker.run";
    REQUIRE(ws.run("baseline --method bm25 --entities " + fixture("entities.jsonl") +
                   " --contexts " + fixture("contexts.jsonl") + " --out '" + bm25.string() + "'")
                .code == 0);
    REQUIRE(ws.run("baseline --method linker --theta 0.6 --entities " + fixture("entities.jsonl") +
                   " --contexts " + fixture("contexts.jsonl") + " --annotations " +
                   fixture("annotations.jsonl") + " --out '" + linker.string() + "'")
                .code == 0);
    CHECK(slurp(linker).find("isai-vc") == std::string::npos);
    CHECK(slurp(linker).find(" linker-t0.6\n") != std::string::npos);

    std::string grid_runs;
    for (const auto& entry : fs::directory_iterator(grid))
        if (entry.path().extension() == ".run") grid_runs += " '" + entry.path().string() + "'";

    SUBCASE("pool") {
        const auto sheet = ws / "pool.tsv";
        const auto r = ws.run("pool --k 20 --contexts " + fixture("contexts.jsonl") + " --out '" +
                              sheet.string() + "'" + grid_runs);
        REQUIRE(r.code == 0);
        std::istringstream lines(slurp(sheet));
        std::string line;
        std::size_t count = 0;
        while (std::getline(lines, line)) {
            ++count;
            CHECK(std::count(line.begin(), line.end(), '\t') == 2);
        }
        // Every candidate of both entities is within the top 20 of some run.
        CHECK(count == 20);
    }
    SUBCASE("eval with subsets and significance") {
        const auto json = ws / "report.json";
        const auto r = ws.run("eval --qrels " + fixture("qrels.txt") + " --subset " +
                              fixture("subsets.txt") + " --json '" + json.string() + "'" +
                              grid_runs + " '" + bm25.string() + "' '" + linker.string() + "'");
        REQUIRE(r.code == 0);
        CHECK(r.output.find("All") != std::string::npos);
        CHECK(r.output.find("in-kb") != std::string::npos);
        CHECK(r.output.find("out-of-kb") != std::string::npos);
        CHECK(r.output.find("basic-n50-m50-semantic") != std::string::npos);
        CHECK(r.output.find("Configurations") != std::string::npos);
        const auto doc = nlohmann::json::parse(slurp(json));
        CHECK(doc["blocks"] == nlohmann::json::array({"All", "in-kb", "out-of-kb"}));
        CHECK(doc["methods"].size() == 26);
        CHECK(doc["configurations"].size() == 12);
    }
    SUBCASE("eval against a chosen run") {
        const auto r = ws.run("eval --qrels " + fixture("qrels.txt") + " --compare-to bm25-baseline '" +
                              bm25.string() + "' '" + linker.string() + "'");
        REQUIRE(r.code == 0);
        CHECK(r.output.find("bm25-baseline") != std::string::npos);
    }
    SUBCASE("malformed run file") {
        const auto broken = ws / "broken.run";
        std::ofstream(broken) << "e Q0 c 1 0.5 tag\ne Q0 c2 x 0.4 tag\n";
        const auto r = ws.run("eval --qrels " + fixture("qrels.txt") + " '" + broken.string() + "'");
        CHECK(r.code == 2);
        CHECK(r.output.find(":2") != std::string::npos);
    }
}
