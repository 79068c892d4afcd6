#pragma once

#include "coasim/claimspace.hpp"
#include "coasim/corpus.hpp"
#include "coasim/similarity.hpp"
#include "coasim/util.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace coasim {

enum class Stage { ingest, sample, vectors, stats, simpairs, ensemble, embed, optimize, threshold, graph, all };

Stage stage_from_name(const std::string& name);
const char* stage_name(Stage s);

enum class CutoffMode { derived_from_threshold, explicit_rank };

struct PipelineConfig {
    // corpus
    std::string corpus_path;
    CorpusFormat corpus_format = CorpusFormat::jsonl;
    AliasTable aliases;
    ExclusionList exclusions = ExclusionList::defaults();
    // sampling
    std::size_t m = 2;
    std::size_t n = 1;
    std::uint64_t seed = 0;
    // measures
    std::vector<Measure> measures{Measure::individual_dice, Measure::wholistic_pcc,
                                  Measure::wholistic_dice};
    // embedding
    std::string provider = "offline"; // offline | remote
    std::string service_url;
    std::string model;
    std::string api_token_env = "COASIM_API_TOKEN";
    std::size_t batch_size = 128;
    std::size_t max_chars = 32768;
    std::string cache_dir; // default <workspace>/cache
    // optimization
    double eps_lo = 0.05;
    double eps_hi = 0.95;
    double lambda_start = 0.005, lambda_step = 0.005, lambda_end = 1.0;
    std::size_t sa_budget = 2000;
    DistanceMetric metric = DistanceMetric::cosine;
    int min_pts = 1;
    // threshold
    OutlierRule outlier_rule = OutlierRule::tukey;
    std::string manual_exclusion_file;
    // graph
    CutoffMode cutoff_mode = CutoffMode::derived_from_threshold;
    double cutoff_rank = 100.0;
    // workspace
    std::string workspace;

    // Parses the config file; CLI-style overrides (key -> value, using the
    // same names as config keys) win. Collects every validation problem
    // before throwing.
    static PipelineConfig load(const std::string& path,
                               const std::map<std::string, std::string>& overrides = {});
    static PipelineConfig from_ini(const IniConfig& ini,
                                   const std::map<std::string, std::string>& overrides = {});
};

struct StageResult {
    Stage stage;
    bool skipped = false; // manifest matched, nothing re-run
};

// Runs one stage (or all). Outputs land in the workspace; each stage writes
// a manifest with its input hashes and parameters, and re-running with
// unchanged inputs is a no-op.
std::vector<StageResult> run_stage(Stage stage, const PipelineConfig& cfg);

// Human-readable summary of whatever stages have completed.
void report(const std::string& workspace, std::ostream& out);

} // namespace coasim
