#include "coasim/pipeline.hpp"

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

namespace {

int fail(const std::string& command, const std::exception& e) {
    nlohmann::json err;
    err["error"] = e.what();
    err["command"] = command;
    std::cerr << err.dump() << "\n";
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"COA similarity pipeline"};
    app.require_subcommand(1);

    std::string stage_name_arg, config_path, workspace;
    std::map<std::string, std::string> overrides;
    std::string seed, eps_bounds, lambda_grid, min_pts, sa_budget, outlier_rule;

    auto* run = app.add_subcommand("run", "Run a pipeline stage");
    run->add_option("stage", stage_name_arg,
                    "ingest|sample|vectors|stats|simpairs|ensemble|embed|optimize|threshold|graph|all")
        ->required();
    run->add_option("--config", config_path, "pipeline config file")->required();
    run->add_option("--workspace", workspace, "override workspace directory");
    run->add_option("--seed", seed, "override sampling/search seed");
    run->add_option("--epsilon-bounds", eps_bounds, "lo:hi");
    run->add_option("--lambda-grid", lambda_grid, "start:step:end (default 0.005:0.005:1)");
    run->add_option("--min-pts", min_pts, "DBSCAN minPts (default 1)");
    run->add_option("--sa-budget", sa_budget, "annealing evaluation budget");
    run->add_option("--outlier-rule", outlier_rule, "tukey | manual:<file> | none");

    std::string report_ws;
    auto* rep = app.add_subcommand("report", "Summarize a workspace");
    rep->add_option("--workspace", report_ws, "workspace directory")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        try {
            if (!workspace.empty()) overrides["dir"] = workspace;
            if (!seed.empty()) overrides["seed"] = seed;
            if (!eps_bounds.empty()) overrides["epsilon_bounds"] = eps_bounds;
            if (!lambda_grid.empty()) overrides["lambda_grid"] = lambda_grid;
            if (!min_pts.empty()) overrides["min_pts"] = min_pts;
            if (!sa_budget.empty()) overrides["sa_budget"] = sa_budget;
            if (!outlier_rule.empty()) overrides["outlier_rule"] = outlier_rule;
            auto cfg = coasim::PipelineConfig::load(config_path, overrides);
            auto results = coasim::run_stage(coasim::stage_from_name(stage_name_arg), cfg);
            for (const auto& r : results)
                std::cout << coasim::stage_name(r.stage) << ": "
                          << (r.skipped ? "up to date" : "done") << "\n";
        } catch (const std::exception& e) {
            return fail("run", e);
        }
    } else if (rep->parsed()) {
        try {
            coasim::report(report_ws, std::cout);
        } catch (const std::exception& e) {
            return fail("report", e);
        }
    }
    return 0;
}
