#include "coasim/pipeline.hpp"

#include "coasim/ensemble.hpp"
#include "coasim/graph.hpp"
#include "coasim/vectors.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <ostream>

#include <fcntl.h>
#include <unistd.h>

#include <json.hpp>

namespace coasim {

using nlohmann::json;
namespace fs = std::filesystem;

Stage stage_from_name(const std::string& name) {
    static const std::map<std::string, Stage> names = {
        {"ingest", Stage::ingest},     {"sample", Stage::sample},       {"vectors", Stage::vectors},
        {"stats", Stage::stats},       {"simpairs", Stage::simpairs},   {"ensemble", Stage::ensemble},
        {"embed", Stage::embed},       {"optimize", Stage::optimize},   {"threshold", Stage::threshold},
        {"graph", Stage::graph},       {"all", Stage::all}};
    auto it = names.find(name);
    if (it == names.end()) throw std::runtime_error("unknown stage: " + name);
    return it->second;
}

const char* stage_name(Stage s) {
    switch (s) {
        case Stage::ingest: return "ingest";
        case Stage::sample: return "sample";
        case Stage::vectors: return "vectors";
        case Stage::stats: return "stats";
        case Stage::simpairs: return "simpairs";
        case Stage::ensemble: return "ensemble";
        case Stage::embed: return "embed";
        case Stage::optimize: return "optimize";
        case Stage::threshold: return "threshold";
        case Stage::graph: return "graph";
        case Stage::all: return "all";
    }
    return "?";
}

namespace {

std::pair<double, double> parse_bounds(const std::string& s) {
    auto parts = split(s, ':');
    if (parts.size() != 2) throw std::runtime_error("expected lo:hi, got " + s);
    return {std::stod(parts[0]), std::stod(parts[1])};
}

std::tuple<double, double, double> parse_grid(const std::string& s) {
    auto parts = split(s, ':');
    if (parts.size() != 3) throw std::runtime_error("expected start:step:end, got " + s);
    return {std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2])};
}

} // namespace

PipelineConfig PipelineConfig::load(const std::string& path,
                                    const std::map<std::string, std::string>& overrides) {
    return from_ini(IniConfig::parse_file(path), overrides);
}

PipelineConfig PipelineConfig::from_ini(const IniConfig& ini,
                                        const std::map<std::string, std::string>& overrides) {
    PipelineConfig cfg;
    std::vector<std::string> errors;

    auto value = [&](const std::string& section, const std::string& key) -> std::optional<std::string> {
        if (auto it = overrides.find(key); it != overrides.end()) return it->second;
        return ini.get(section, key);
    };

    if (auto v = value("corpus", "path")) cfg.corpus_path = *v;
    if (auto v = value("corpus", "format")) {
        if (*v == "jsonl") cfg.corpus_format = CorpusFormat::jsonl;
        else if (*v == "csv") cfg.corpus_format = CorpusFormat::csv;
        else errors.push_back("corpus.format must be jsonl or csv");
    }
    // every key in [aliases] maps alias -> canonical act name
    for (const auto& [alias, canonical] : ini.pairs("aliases")) cfg.aliases[alias] = canonical;

    try {
        if (auto v = value("sample", "m")) cfg.m = std::stoul(*v);
        if (auto v = value("sample", "n")) cfg.n = std::stoul(*v);
        if (auto v = value("sample", "seed")) cfg.seed = std::stoull(*v);
        if (auto v = overrides.find("seed"); v != overrides.end()) cfg.seed = std::stoull(v->second);
    } catch (const std::exception&) {
        errors.push_back("sample.m/n/seed must be integers");
    }

    if (auto v = value("exclusions", "acts")) {
        cfg.exclusions.acts.clear();
        if (*v != "none")
            for (const auto& act : split(*v, ','))
                if (!trim(act).empty()) cfg.exclusions.acts.insert(std::string(trim(act)));
    }

    if (auto v = value("measures", "list")) {
        cfg.measures.clear();
        try {
            for (const auto& name : split(*v, ','))
                if (!trim(name).empty()) cfg.measures.push_back(measure_from_name(std::string(trim(name))));
        } catch (const std::exception& e) {
            errors.push_back(e.what());
        }
    }

    if (auto v = value("embedding", "provider")) cfg.provider = *v;
    if (auto v = value("embedding", "url")) cfg.service_url = *v;
    if (auto v = value("embedding", "model")) cfg.model = *v;
    if (auto v = value("embedding", "token_env")) cfg.api_token_env = *v;
    if (auto v = value("embedding", "batch_size")) cfg.batch_size = std::stoul(*v);
    if (auto v = value("embedding", "max_chars")) cfg.max_chars = std::stoul(*v);
    if (auto v = value("embedding", "cache_dir")) cfg.cache_dir = *v;

    try {
        if (auto v = value("optimize", "epsilon_bounds"))
            std::tie(cfg.eps_lo, cfg.eps_hi) = parse_bounds(*v);
        if (auto v = value("optimize", "lambda_grid"))
            std::tie(cfg.lambda_start, cfg.lambda_step, cfg.lambda_end) = parse_grid(*v);
        if (auto v = value("optimize", "sa_budget")) cfg.sa_budget = std::stoul(*v);
        if (auto v = value("optimize", "min_pts")) cfg.min_pts = std::stoi(*v);
        if (auto v = value("optimize", "metric")) cfg.metric = metric_from_name(*v);
    } catch (const std::exception& e) {
        errors.push_back(std::string("optimize section: ") + e.what());
    }

    if (auto v = value("threshold", "outlier_rule")) {
        if (*v == "tukey") cfg.outlier_rule = OutlierRule::tukey;
        else if (*v == "none") cfg.outlier_rule = OutlierRule::none;
        else if (v->rfind("manual:", 0) == 0) {
            cfg.outlier_rule = OutlierRule::manual;
            cfg.manual_exclusion_file = v->substr(7);
        } else
            errors.push_back("threshold.outlier_rule must be tukey, none, or manual:<file>");
    }

    if (auto v = value("graph", "cutoff_mode")) {
        if (*v == "threshold") cfg.cutoff_mode = CutoffMode::derived_from_threshold;
        else if (*v == "rank") cfg.cutoff_mode = CutoffMode::explicit_rank;
        else errors.push_back("graph.cutoff_mode must be threshold or rank");
    }
    if (auto v = value("graph", "cutoff_rank")) cfg.cutoff_rank = std::stod(*v);

    if (auto v = value("workspace", "dir")) cfg.workspace = *v;
    if (cfg.cache_dir.empty() && !cfg.workspace.empty())
        cfg.cache_dir = (fs::path(cfg.workspace) / "cache").string();

    // validation, all at once
    if (cfg.corpus_path.empty()) errors.push_back("corpus.path is required");
    if (cfg.workspace.empty()) errors.push_back("workspace.dir is required");
    if (cfg.m < 2) errors.push_back("sample.m must be >= 2");
    if (cfg.n < 1) errors.push_back("sample.n must be >= 1");
    if (!(cfg.lambda_start > 0) || cfg.lambda_end > 1.0 + 1e-12 || cfg.lambda_step <= 0 ||
        cfg.lambda_end < cfg.lambda_start)
        errors.push_back("lambda grid must lie within (0,1] with positive step");
    if (!(cfg.eps_lo > 0) || !(cfg.eps_hi > cfg.eps_lo))
        errors.push_back("epsilon bounds must satisfy 0 < lo < hi");
    if (cfg.provider != "offline" && cfg.provider != "remote")
        errors.push_back("embedding.provider must be offline or remote");
    if (cfg.provider == "remote" && cfg.service_url.empty())
        errors.push_back("embedding.url is required for the remote provider");
    if (cfg.min_pts < 1) errors.push_back("min_pts must be >= 1");
    if (cfg.measures.empty()) errors.push_back("measures.list must name at least one measure");

    if (!errors.empty()) {
        std::string all = "invalid configuration:";
        for (const auto& e : errors) all += "\n  - " + e;
        throw std::runtime_error(all);
    }
    return cfg;
}

namespace {

struct Workspace {
    fs::path root;

    fs::path artifact(const std::string& name) const { return root / name; }
    fs::path manifest(Stage s) const { return root / "manifests" / (std::string(stage_name(s)) + ".json"); }
};

// Exclusive per-workspace lock, released on destruction.
class WorkspaceLock {
public:
    explicit WorkspaceLock(const fs::path& root) : path_(root / ".lock") {
        fs::create_directories(root);
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0)
            throw std::runtime_error("workspace is locked by another run (" + path_.string() + ")");
    }
    ~WorkspaceLock() {
        if (fd_ >= 0) {
            ::close(fd_);
            std::error_code ec;
            fs::remove(path_, ec);
        }
    }
    WorkspaceLock(const WorkspaceLock&) = delete;
    WorkspaceLock& operator=(const WorkspaceLock&) = delete;

private:
    fs::path path_;
    int fd_ = -1;
};

json hash_inputs(const std::vector<fs::path>& inputs, Stage stage) {
    json j = json::object();
    for (const auto& p : inputs) {
        if (!fs::exists(p)) {
            // name the producing stage when the missing file is a workspace artifact
            static const std::map<std::string, std::string> producers = {
                {"corpus.jsonl", "ingest"},        {"sampled.jsonl", "sample"},
                {"sampled_raw.jsonl", "sample"},   {"article_index.csv", "vectors"},
                {"embeddings.jsonl", "embed"},     {"ensemble.csv", "ensemble"},
                {"utility.json", "optimize"},      {"threshold.json", "threshold"}};
            auto fname = p.filename().string();
            std::string hint;
            if (auto it = producers.find(fname); it != producers.end())
                hint = "; run stage '" + it->second + "' first";
            else if (fname.rfind("pairs_", 0) == 0)
                hint = "; run stage 'simpairs' first";
            else if (fname.rfind("ranks_", 0) == 0)
                hint = "; run stage 'ensemble' first";
            throw std::runtime_error("stage '" + std::string(stage_name(stage)) +
                                     "' missing input " + p.string() + hint);
        }
        j[p.string()] = sha256_file_hex(p.string());
    }
    return j;
}

// Returns true when the stored manifest matches inputs+params and all
// outputs still exist.
bool up_to_date(const Workspace& ws, Stage stage, const json& inputs, const json& params,
                const std::vector<fs::path>& outputs) {
    auto mpath = ws.manifest(stage);
    if (!fs::exists(mpath)) return false;
    json m;
    try {
        m = json::parse(read_file(mpath.string()));
    } catch (...) {
        return false;
    }
    if (m.value("inputs", json::object()) != inputs) return false;
    if (m.value("params", json::object()) != params) return false;
    for (const auto& o : outputs)
        if (!fs::exists(o)) return false;
    return true;
}

void write_manifest(const Workspace& ws, Stage stage, const json& inputs, const json& params,
                    const std::vector<fs::path>& outputs) {
    json m;
    m["stage"] = stage_name(stage);
    m["inputs"] = inputs;
    m["params"] = params;
    json outs = json::array();
    for (const auto& o : outputs) outs.push_back(o.string());
    m["outputs"] = outs;
    m["timestamp"] = static_cast<std::int64_t>(
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
    write_file_atomic(ws.manifest(stage).string(), m.dump(2) + "\n");
}

Corpus load_jsonl_artifact(const fs::path& p) {
    // workspace artifacts are already normalized; no aliasing on reload
    return load_corpus(p.string(), CorpusFormat::jsonl);
}

EmbeddingSet load_embeddings(const fs::path& p) {
    EmbeddingSet set;
    for (const auto& line : split(read_file(p.string()), '\n')) {
        if (trim(line).empty()) continue;
        json j = json::parse(line);
        Embedding e;
        e.case_id = j.at("case_id").get<std::string>();
        e.provider_id = j.at("provider").get<std::string>();
        e.vector = j.at("vector").get<std::vector<float>>();
        set.provider_id = e.provider_id;
        set.insert(std::move(e));
    }
    return set;
}

SimilarityRelation load_relation(const fs::path& utility_json) {
    json j = json::parse(read_file(utility_json.string()));
    SimilarityRelation rel;
    rel.lambda = j.at("lambda").get<double>();
    for (const auto& p : j.at("pairs")) {
        CoaPair pair{p.at("coa_a").get<std::string>(), p.at("coa_b").get<std::string>()};
        rel.pairs[pair] = PairEvidence{p.at("s").get<std::size_t>(), p.at("t").get<std::size_t>(),
                                       p.at("n").get<std::size_t>()};
    }
    return rel;
}

json common_params(const PipelineConfig& cfg) {
    json p;
    p["m"] = cfg.m;
    p["n"] = cfg.n;
    p["seed"] = cfg.seed;
    return p;
}

StageResult do_ingest(const Workspace& ws, const PipelineConfig& cfg) {
    auto inputs = hash_inputs({cfg.corpus_path}, Stage::ingest);
    json params;
    params["format"] = cfg.corpus_format == CorpusFormat::jsonl ? "jsonl" : "csv";
    json aliases = json::object();
    for (const auto& [a, c] : cfg.aliases) aliases[a] = c;
    params["aliases"] = aliases;
    std::vector<fs::path> outputs{ws.artifact("corpus.jsonl")};
    if (up_to_date(ws, Stage::ingest, inputs, params, outputs)) return {Stage::ingest, true};

    Corpus corpus = load_corpus(cfg.corpus_path, cfg.corpus_format, cfg.aliases);
    write_file_atomic(outputs[0].string(), corpus_to_jsonl(corpus));
    write_manifest(ws, Stage::ingest, inputs, params, outputs);
    return {Stage::ingest, false};
}

StageResult do_sample(const Workspace& ws, const PipelineConfig& cfg) {
    auto inputs = hash_inputs({ws.artifact("corpus.jsonl")}, Stage::sample);
    json params = common_params(cfg);
    params["exclusions"] = std::vector<std::string>(cfg.exclusions.acts.begin(),
                                                    cfg.exclusions.acts.end());
    std::vector<fs::path> outputs{ws.artifact("sampled_raw.jsonl"), ws.artifact("sampled.jsonl")};
    if (up_to_date(ws, Stage::sample, inputs, params, outputs)) return {Stage::sample, true};

    Corpus corpus = load_jsonl_artifact(ws.artifact("corpus.jsonl"));
    Corpus sampled = sample_cases(corpus, cfg.m, cfg.n, cfg.seed);
    write_file_atomic(outputs[0].string(), corpus_to_jsonl(sampled));
    write_file_atomic(outputs[1].string(), corpus_to_jsonl(apply_exclusions(sampled, cfg.exclusions)));
    write_manifest(ws, Stage::sample, inputs, params, outputs);
    return {Stage::sample, false};
}

StageResult do_vectors(const Workspace& ws, const PipelineConfig& cfg) {
    auto inputs = hash_inputs({ws.artifact("sampled.jsonl")}, Stage::vectors);
    json params = json::object();
    std::vector<fs::path> outputs{ws.artifact("article_index.csv")};
    if (up_to_date(ws, Stage::vectors, inputs, params, outputs)) return {Stage::vectors, true};

    Corpus sampled = load_jsonl_artifact(ws.artifact("sampled.jsonl"));
    auto index = ArticleIndex::build(sampled);
    write_file_atomic(outputs[0].string(), index.to_csv());
    write_manifest(ws, Stage::vectors, inputs, params, outputs);
    return {Stage::vectors, false};
}

StageResult do_stats(const Workspace& ws, const PipelineConfig& cfg) {
    auto inputs = hash_inputs({ws.artifact("sampled_raw.jsonl")}, Stage::stats);
    json params;
    params["exclusions"] = std::vector<std::string>(cfg.exclusions.acts.begin(),
                                                    cfg.exclusions.acts.end());
    std::vector<fs::path> outputs{ws.artifact("histogram.csv")};
    if (up_to_date(ws, Stage::stats, inputs, params, outputs)) return {Stage::stats, true};

    Corpus raw = load_jsonl_artifact(ws.artifact("sampled_raw.jsonl"));
    Histogram without = citation_histogram(raw);
    Histogram with = citation_histogram(raw, &cfg.exclusions);
    std::string csv = "citations,cases,exclusion_applied\n";
    for (const auto& [k, c] : without)
        csv += std::to_string(k) + "," + std::to_string(c) + ",0\n";
    for (const auto& [k, c] : with)
        csv += std::to_string(k) + "," + std::to_string(c) + ",1\n";
    write_file_atomic(outputs[0].string(), csv);
    write_manifest(ws, Stage::stats, inputs, params, outputs);
    return {Stage::stats, false};
}

StageResult do_simpairs(const Workspace& ws, const PipelineConfig& cfg) {
    auto inputs = hash_inputs({ws.artifact("sampled.jsonl"), ws.artifact("article_index.csv")},
                              Stage::simpairs);
    json params;
    std::vector<std::string> names;
    for (auto m : cfg.measures) names.push_back(measure_name(m));
    params["measures"] = names;
    std::vector<fs::path> outputs;
    for (const auto& name : names) outputs.push_back(ws.artifact("pairs_" + name + ".csv"));
    if (up_to_date(ws, Stage::simpairs, inputs, params, outputs)) return {Stage::simpairs, true};

    Corpus sampled = load_jsonl_artifact(ws.artifact("sampled.jsonl"));
    auto index = ArticleIndex::from_csv(read_file(ws.artifact("article_index.csv").string()));
    for (std::size_t i = 0; i < cfg.measures.size(); ++i) {
        auto table = pair_table(sampled, index, cfg.measures[i]);
        write_file_atomic(outputs[i].string(), table.to_csv());
    }
    write_manifest(ws, Stage::simpairs, inputs, params, outputs);
    return {Stage::simpairs, false};
}

StageResult do_ensemble(const Workspace& ws, const PipelineConfig& cfg) {
    std::vector<fs::path> input_paths;
    for (auto m : cfg.measures)
        input_paths.push_back(ws.artifact("pairs_" + std::string(measure_name(m)) + ".csv"));
    auto inputs = hash_inputs(input_paths, Stage::ensemble);
    json params = json::object();
    std::vector<fs::path> outputs;
    for (auto m : cfg.measures)
        outputs.push_back(ws.artifact("ranks_" + std::string(measure_name(m)) + ".csv"));
    outputs.push_back(ws.artifact("ensemble.csv"));
    if (up_to_date(ws, Stage::ensemble, inputs, params, outputs)) return {Stage::ensemble, true};

    std::vector<RankList> lists;
    for (std::size_t i = 0; i < cfg.measures.size(); ++i) {
        auto table = PairScoreTable::from_csv(read_file(input_paths[i].string()), cfg.measures[i]);
        lists.push_back(rank_pairs(table));
        write_file_atomic(outputs[i].string(), lists.back().to_csv());
    }
    auto ens = ensemble_ranks(lists);
    write_file_atomic(outputs.back().string(), ens.to_csv());
    write_manifest(ws, Stage::ensemble, inputs, params, outputs);
    return {Stage::ensemble, false};
}

StageResult do_embed(const Workspace& ws, const PipelineConfig& cfg) {
    auto inputs = hash_inputs({ws.artifact("sampled.jsonl")}, Stage::embed);
    json params;
    params["provider"] = cfg.provider;
    params["model"] = cfg.model;
    std::vector<fs::path> outputs{ws.artifact("embeddings.jsonl")};
    if (up_to_date(ws, Stage::embed, inputs, params, outputs)) return {Stage::embed, true};

    Corpus sampled = load_jsonl_artifact(ws.artifact("sampled.jsonl"));
    std::unique_ptr<EmbeddingProvider> provider;
    if (cfg.provider == "offline") {
        provider = make_offline_provider();
    } else {
        RemoteProviderConfig rc;
        rc.url = cfg.service_url;
        rc.model = cfg.model;
        if (const char* tok = std::getenv(cfg.api_token_env.c_str())) rc.api_token = tok;
        rc.batch_size = cfg.batch_size;
        rc.max_chars = cfg.max_chars;
        provider = make_remote_provider(rc);
    }
    auto set = embed_claims(sampled.cases, *provider, cfg.cache_dir,
                            [](const std::string& msg) { std::cerr << "warning: " << msg << "\n"; });
    std::string out;
    for (const auto& [id, e] : set.entries) {
        json j;
        j["case_id"] = e.case_id;
        j["provider"] = e.provider_id;
        j["vector"] = e.vector;
        out += j.dump();
        out += '\n';
    }
    write_file_atomic(outputs[0].string(), out);
    write_manifest(ws, Stage::embed, inputs, params, outputs);
    return {Stage::embed, false};
}

StageResult do_optimize(const Workspace& ws, const PipelineConfig& cfg) {
    auto inputs = hash_inputs({ws.artifact("embeddings.jsonl"), ws.artifact("sampled.jsonl"),
                               ws.artifact("pairs_individual_dice.csv")},
                              Stage::optimize);
    json params = common_params(cfg);
    params["epsilon_bounds"] = {cfg.eps_lo, cfg.eps_hi};
    params["lambda_grid"] = {cfg.lambda_start, cfg.lambda_step, cfg.lambda_end};
    params["sa_budget"] = cfg.sa_budget;
    params["metric"] = metric_name(cfg.metric);
    params["min_pts"] = cfg.min_pts;
    std::vector<fs::path> outputs{ws.artifact("utility.json"), ws.artifact("sa_trace.csv")};
    if (up_to_date(ws, Stage::optimize, inputs, params, outputs)) return {Stage::optimize, true};

    auto emb = load_embeddings(ws.artifact("embeddings.jsonl"));
    Corpus sampled = load_jsonl_artifact(ws.artifact("sampled.jsonl"));
    auto dice_table = PairScoreTable::from_csv(
        read_file(ws.artifact("pairs_individual_dice.csv").string()), Measure::individual_dice);
    auto grid = make_lambda_grid(cfg.lambda_start, cfg.lambda_step, cfg.lambda_end);
    std::vector<SaTracePoint> trace;
    auto result = optimize(emb, sampled, dice_table, cfg.eps_lo, cfg.eps_hi, grid, cfg.seed,
                           cfg.sa_budget, cfg.metric, cfg.min_pts, &trace);
    write_file_atomic(outputs[0].string(), result.to_json());
    std::string csv = "iteration,epsilon,lambda,utility,accepted\n";
    for (const auto& t : trace)
        csv += std::to_string(t.iteration) + "," + format_double(t.epsilon) + "," +
               format_double(t.lambda) + "," + format_double(t.utility) + "," +
               (t.accepted ? "1" : "0") + "\n";
    write_file_atomic(outputs[1].string(), csv);
    write_manifest(ws, Stage::optimize, inputs, params, outputs);
    return {Stage::optimize, false};
}

StageResult do_threshold(const Workspace& ws, const PipelineConfig& cfg) {
    std::vector<fs::path> input_paths{ws.artifact("utility.json"), ws.artifact("ensemble.csv")};
    if (cfg.outlier_rule == OutlierRule::manual) input_paths.push_back(cfg.manual_exclusion_file);
    auto inputs = hash_inputs(input_paths, Stage::threshold);
    json params;
    params["outlier_rule"] = cfg.outlier_rule == OutlierRule::tukey ? "tukey"
                             : cfg.outlier_rule == OutlierRule::none ? "none"
                                                                     : "manual";
    std::vector<fs::path> outputs{ws.artifact("threshold.json")};
    if (up_to_date(ws, Stage::threshold, inputs, params, outputs)) return {Stage::threshold, true};

    auto rel = load_relation(ws.artifact("utility.json"));
    auto ens = RankList::from_csv(read_file(ws.artifact("ensemble.csv").string()));
    std::set<double> manual;
    if (cfg.outlier_rule == OutlierRule::manual)
        for (const auto& line : split(read_file(cfg.manual_exclusion_file), '\n'))
            if (!trim(line).empty()) manual.insert(std::stod(std::string(trim(line))));
    auto report = determine_threshold(rel, ens, cfg.outlier_rule, manual);
    write_file_atomic(outputs[0].string(), report.to_json());
    write_manifest(ws, Stage::threshold, inputs, params, outputs);
    return {Stage::threshold, false};
}

StageResult do_graph(const Workspace& ws, const PipelineConfig& cfg) {
    std::vector<fs::path> input_paths{ws.artifact("ensemble.csv")};
    if (cfg.cutoff_mode == CutoffMode::derived_from_threshold)
        input_paths.push_back(ws.artifact("threshold.json"));
    auto inputs = hash_inputs(input_paths, Stage::graph);
    json params;
    params["cutoff_mode"] =
        cfg.cutoff_mode == CutoffMode::derived_from_threshold ? "threshold" : "rank";
    if (cfg.cutoff_mode == CutoffMode::explicit_rank) params["cutoff_rank"] = cfg.cutoff_rank;
    fs::path gdir = ws.artifact("graph");
    std::vector<fs::path> outputs{gdir / "nodes.csv", gdir / "edges.csv", gdir / "graph.gexf"};
    if (up_to_date(ws, Stage::graph, inputs, params, outputs)) return {Stage::graph, true};

    auto ens = RankList::from_csv(read_file(ws.artifact("ensemble.csv").string()));
    double cutoff = cfg.cutoff_rank;
    if (cfg.cutoff_mode == CutoffMode::derived_from_threshold) {
        json t = json::parse(read_file(ws.artifact("threshold.json").string()));
        cutoff = t.at("threshold").get<double>();
    }
    auto g = build_graph(ens, cutoff);
    export_gephi(g, gdir.string());
    write_manifest(ws, Stage::graph, inputs, params, outputs);
    return {Stage::graph, false};
}

} // namespace

std::vector<StageResult> run_stage(Stage stage, const PipelineConfig& cfg) {
    Workspace ws{fs::path(cfg.workspace)};
    WorkspaceLock lock(ws.root);
    fs::create_directories(ws.root / "manifests");

    std::vector<Stage> plan;
    if (stage == Stage::all)
        plan = {Stage::ingest, Stage::sample, Stage::vectors,  Stage::stats,
                Stage::simpairs, Stage::ensemble, Stage::embed, Stage::optimize,
                Stage::threshold, Stage::graph};
    else
        plan = {stage};

    std::vector<StageResult> results;
    for (Stage s : plan) {
        switch (s) {
            case Stage::ingest: results.push_back(do_ingest(ws, cfg)); break;
            case Stage::sample: results.push_back(do_sample(ws, cfg)); break;
            case Stage::vectors: results.push_back(do_vectors(ws, cfg)); break;
            case Stage::stats: results.push_back(do_stats(ws, cfg)); break;
            case Stage::simpairs: results.push_back(do_simpairs(ws, cfg)); break;
            case Stage::ensemble: results.push_back(do_ensemble(ws, cfg)); break;
            case Stage::embed: results.push_back(do_embed(ws, cfg)); break;
            case Stage::optimize: results.push_back(do_optimize(ws, cfg)); break;
            case Stage::threshold: results.push_back(do_threshold(ws, cfg)); break;
            case Stage::graph: results.push_back(do_graph(ws, cfg)); break;
            case Stage::all: break;
        }
    }
    return results;
}

void report(const std::string& workspace, std::ostream& out) {
    Workspace ws{fs::path(workspace)};
    if (!fs::exists(ws.root / "manifests")) throw std::runtime_error("empty workspace: " + workspace);
    bool any = false;

    if (fs::exists(ws.artifact("corpus.jsonl"))) {
        any = true;
        Corpus c = load_jsonl_artifact(ws.artifact("corpus.jsonl"));
        out << "corpus: " << c.cases.size() << " cases, " << c.coa_index.size() << " COAs\n";
    }
    if (fs::exists(ws.artifact("sampled.jsonl"))) {
        Corpus c = load_jsonl_artifact(ws.artifact("sampled.jsonl"));
        std::size_t n = c.coa_index.empty() ? 0 : c.coa_index.begin()->second.size();
        out << "sampled: m=" << c.coa_index.size() << " COAs x n=" << n << " cases = "
            << c.cases.size() << "\n";
    }
    if (fs::exists(ws.artifact("article_index.csv"))) {
        auto index = ArticleIndex::from_csv(read_file(ws.artifact("article_index.csv").string()));
        out << "article index: alpha=" << index.dimension() << "\n";
    }

    std::vector<std::pair<Measure, RankList>> base_lists;
    for (auto m : {Measure::individual_dice, Measure::wholistic_pcc, Measure::wholistic_dice}) {
        auto ppath = ws.artifact("pairs_" + std::string(measure_name(m)) + ".csv");
        if (!fs::exists(ppath)) continue;
        auto table = PairScoreTable::from_csv(read_file(ppath.string()), m);
        out << "\n" << measure_name(m) << ": " << table.scores.size() << " pairs, top 4:\n";
        auto sorted = table.scores;
        std::stable_sort(sorted.begin(), sorted.end(),
                         [](const auto& a, const auto& b) { return a.score > b.score; });
        for (std::size_t i = 0; i < std::min<std::size_t>(4, sorted.size()); ++i)
            out << "  " << (i + 1) << ". " << sorted[i].coa_a << " / " << sorted[i].coa_b << "  ("
                << format_double(sorted[i].score) << ")\n";
        auto rpath = ws.artifact("ranks_" + std::string(measure_name(m)) + ".csv");
        if (fs::exists(rpath))
            base_lists.emplace_back(m, RankList::from_csv(read_file(rpath.string())));
    }

    if (fs::exists(ws.artifact("ensemble.csv"))) {
        auto ens = RankList::from_csv(read_file(ws.artifact("ensemble.csv").string()));
        out << "\nensemble: " << ens.ranks.size() << " ranked pairs\n";
        out << "ranking PCC vs ensemble:\n";
        for (const auto& [m, list] : base_lists)
            out << "  " << measure_name(m) << ": " << format_double(ranking_pcc(list, ens)) << "\n";
    }

    if (fs::exists(ws.artifact("utility.json"))) {
        json u = json::parse(read_file(ws.artifact("utility.json").string()));
        out << "\noptimizer: epsilon=" << format_double(u.at("epsilon").get<double>())
            << " lambda=" << format_double(u.at("lambda").get<double>())
            << " utility=" << format_double(u.at("utility").get<double>())
            << " |T_sim|=" << u.at("coa_set_size").get<std::size_t>()
            << " |R_sim|=" << u.at("pair_count").get<std::size_t>() << "\n";
    }
    if (fs::exists(ws.artifact("threshold.json"))) {
        json t = json::parse(read_file(ws.artifact("threshold.json").string()));
        out << "threshold: mu=" << format_double(t.at("mu").get<double>())
            << " sigma=" << format_double(t.at("sigma").get<double>())
            << " mu+2sigma=" << format_double(t.at("threshold").get<double>()) << " ("
            << t.at("outlier_ranks").size() << " outliers excluded)\n";
    }
    if (fs::exists(ws.artifact("graph") / "graph.gexf")) {
        auto g = from_gexf(read_file((ws.artifact("graph") / "graph.gexf").string()));
        auto comps = components(g);
        auto cls = cliques(g, 3);
        out << "graph: " << g.node_count() << " nodes, " << g.edges.size() << " edges, "
            << comps.size() << " components, " << cls.size() << " maximal cliques (size >= 3)\n";
    }

    if (!any) throw std::runtime_error("no completed stages in workspace: " + workspace);
}

} // namespace coasim
