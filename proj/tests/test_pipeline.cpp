#include "coasim/pipeline.hpp"

#include "coasim/corpus.hpp"
#include "coasim/util.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace coasim;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

// three COAs x four cases; two COAs share most citations and claim text
std::string synthetic_corpus() {
    std::string out;
    auto row = [&](const std::string& id, const std::string& coa, const std::string& cites,
                   const std::string& claim) {
        out += R"({"case_id":")" + id + R"(","coa":")" + coa + R"(","citations":[)" + cites +
               R"(],"claim_text":")" + claim + R"("})" + "\n";
    };
    for (int i = 0; i < 4; ++i) {
        std::string sfx = std::to_string(i);
        row("a" + sfx, "清償借款", R"("民法第478條","民法第233條")", "返還借款本息甲" + sfx);
        row("b" + sfx, "返還借款", R"("民法第478條","民法第229條")", "返還借款本息乙" + sfx);
        row("c" + sfx, "損害賠償", R"("民法第184條","民法第191-2條")", "侵權行為車禍賠償" + sfx);
    }
    return out;
}

PipelineConfig config_for(const fs::path& dir) {
    std::string corpus_path = (dir / "corpus_in.jsonl").string();
    std::ofstream(corpus_path) << synthetic_corpus();
    std::string ini = R"(
[corpus]
path = )" + corpus_path + R"(
format = jsonl

[sample]
m = 3
n = 4
seed = 7

[optimize]
epsilon_bounds = 0.05:0.9
lambda_grid = 0.05:0.05:1.0
sa_budget = 200

[threshold]
outlier_rule = none

[workspace]
dir = )" + (dir / "ws").string() + "\n";
    return PipelineConfig::from_ini(IniConfig::parse(ini));
}

} // namespace

TEST_CASE("config parsing applies overrides and defaults") {
    auto dir = fresh_dir("coasim_cfg_test");
    auto cfg = config_for(dir);
    CHECK(cfg.m == 3);
    CHECK(cfg.n == 4);
    CHECK(cfg.seed == 7);
    CHECK(cfg.eps_lo == 0.05);
    CHECK(cfg.eps_hi == 0.9);
    CHECK(cfg.sa_budget == 200);
    CHECK(cfg.outlier_rule == OutlierRule::none);
    CHECK(cfg.provider == "offline");
    CHECK(cfg.measures.size() == 3);
    CHECK(cfg.exclusions.acts.count("民事訴訟法") == 1);
    CHECK(cfg.cache_dir == (fs::path(cfg.workspace) / "cache").string());

    std::ofstream(dir / "cfg.ini") << "[corpus]\npath = " << (dir / "corpus_in.jsonl").string()
                                   << "\n[workspace]\ndir = " << (dir / "ws").string() << "\n";
    auto over = PipelineConfig::load((dir / "cfg.ini").string(),
                                     {{"seed", "99"}, {"sa_budget", "5"}, {"min_pts", "2"}});
    CHECK(over.seed == 99);
    CHECK(over.sa_budget == 5);
    CHECK(over.min_pts == 2);
}

TEST_CASE("config validation reports every problem at once") {
    std::string bad = R"(
[sample]
m = 1
n = 0

[optimize]
lambda_grid = 0.0:0.1:2.0
epsilon_bounds = 0.9:0.1

[embedding]
provider = nonsense
)";
    try {
        PipelineConfig::from_ini(IniConfig::parse(bad));
        FAIL("expected validation failure");
    } catch (const std::exception& e) {
        std::string msg = e.what();
        CHECK(msg.find("corpus.path") != std::string::npos);
        CHECK(msg.find("workspace.dir") != std::string::npos);
        CHECK(msg.find("sample.m") != std::string::npos);
        CHECK(msg.find("sample.n") != std::string::npos);
        CHECK(msg.find("lambda grid") != std::string::npos);
        CHECK(msg.find("epsilon bounds") != std::string::npos);
        CHECK(msg.find("provider") != std::string::npos);
    }
}

TEST_CASE("full pipeline run produces all artifacts and is idempotent") {
    auto dir = fresh_dir("coasim_pipe_test");
    auto cfg = config_for(dir);

    auto results = run_stage(Stage::all, cfg);
    REQUIRE(results.size() == 10);
    for (const auto& r : results) CHECK(!r.skipped);

    fs::path ws = cfg.workspace;
    for (const char* f : {"corpus.jsonl", "sampled_raw.jsonl", "sampled.jsonl",
                          "article_index.csv", "histogram.csv", "pairs_individual_dice.csv",
                          "pairs_wholistic_pcc.csv", "pairs_wholistic_dice.csv", "ensemble.csv",
                          "embeddings.jsonl", "utility.json", "sa_trace.csv", "threshold.json"})
        CHECK(fs::exists(ws / f));
    for (const char* f : {"nodes.csv", "edges.csv", "graph.gexf"})
        CHECK(fs::exists(ws / "graph" / f));
    CHECK(fs::exists(ws / "manifests" / "optimize.json"));
    CHECK(!fs::exists(ws / ".lock")); // released after the run

    // 3 COAs -> 3 pairs in every table
    auto ens = RankList::from_csv(read_file((ws / "ensemble.csv").string()));
    CHECK(ens.ranks.size() == 3);

    // second run: every stage skips via its manifest
    auto again = run_stage(Stage::all, cfg);
    for (const auto& r : again) CHECK(r.skipped);

    // touching an input invalidates downstream stages
    std::ofstream((dir / "corpus_in.jsonl"), std::ios::app) <<
        R"({"case_id":"d0","coa":"清償借款","citations":["民法第478條"],"claim_text":"新增"})" << "\n";
    auto third = run_stage(Stage::ingest, cfg);
    CHECK(!third[0].skipped);
}

TEST_CASE("missing prerequisites name the producing stage") {
    auto dir = fresh_dir("coasim_missing_test");
    auto cfg = config_for(dir);
    try {
        run_stage(Stage::vectors, cfg);
        FAIL("expected missing-input failure");
    } catch (const std::exception& e) {
        std::string msg = e.what();
        CHECK(msg.find("sampled.jsonl") != std::string::npos);
        CHECK(msg.find("'sample'") != std::string::npos);
    }
    CHECK(!fs::exists(fs::path(cfg.workspace) / ".lock")); // lock released on failure
}

TEST_CASE("workspace lock rejects concurrent runs") {
    auto dir = fresh_dir("coasim_lock_test");
    auto cfg = config_for(dir);
    fs::create_directories(cfg.workspace);
    std::ofstream(fs::path(cfg.workspace) / ".lock") << "pid 12345\n";
    CHECK_THROWS_WITH_AS(run_stage(Stage::ingest, cfg), doctest::Contains("locked"),
                         std::runtime_error);
    fs::remove(fs::path(cfg.workspace) / ".lock");
    CHECK_NOTHROW(run_stage(Stage::ingest, cfg));
}

TEST_CASE("report summarizes a completed workspace") {
    auto dir = fresh_dir("coasim_report_test");
    auto cfg = config_for(dir);
    run_stage(Stage::all, cfg);
    std::ostringstream out;
    report(cfg.workspace, out);
    auto text = out.str();
    CHECK(text.find("corpus: 12 cases") != std::string::npos);
    CHECK(text.find("ensemble: 3 ranked pairs") != std::string::npos);
    CHECK(text.find("optimizer:") != std::string::npos);
    CHECK(text.find("threshold:") != std::string::npos);
    CHECK(text.find("graph:") != std::string::npos);

    CHECK_THROWS(report((dir / "nowhere").string(), out));
}
