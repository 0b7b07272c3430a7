#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "synclaw/config.hpp"
#include "synclaw/experiments.hpp"

namespace {

synclaw::ExperimentConfig oracle_defaults() {
    synclaw::ExperimentConfig cfg;
    cfg.experiment = "oracle";
    cfg.model_name = "zero";
    cfg.grid_n_cells = 256;
    cfg.solver_dt = 1e-4;
    cfg.solver_t_final = 0.2;
    cfg.output_dir = "out_oracle";
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"synclaw: coupled scalar conservation law laboratory"};
    app.require_subcommand(1);

    int workers = 1;
    std::string output_root;
    app.add_option("--workers", workers, "worker threads (results are worker-count invariant)");
    app.add_option("--output-root", output_root,
                   "artifact root directory (default: $SYNCLAW_OUTPUT_ROOT or .)");

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "run the experiment described by a config file");
    run_cmd->add_option("config", config_path, "config file")->required();
    run_cmd->fallthrough();

    std::string manifest_path;
    auto* replay_cmd =
        app.add_subcommand("replay", "re-run a manifest and verify byte-exact artifacts");
    replay_cmd->add_option("manifest", manifest_path, "manifest.json from a completed run")
        ->required();
    replay_cmd->fallthrough();

    auto* oracle_cmd = app.add_subcommand("oracle", "run the closed-form oracle checks");
    oracle_cmd->fallthrough();

    CLI11_PARSE(app, argc, argv);

    synclaw::RunOptions opts;
    opts.workers = workers;
    opts.output_root = output_root;

    try {
        if (run_cmd->parsed()) {
            const synclaw::ExperimentConfig cfg = synclaw::load_config(config_path);
            const synclaw::RunResult result = synclaw::run(cfg, opts);
            std::printf("%s\n", result.manifest_path.c_str());
            if (result.status != 0) {
                std::fprintf(stderr, "run failed; see %s/failure.json\n", result.output_dir.c_str());
                return result.status;
            }
            return 0;
        }
        if (replay_cmd->parsed()) {
            const synclaw::ReplayResult result = synclaw::replay(manifest_path, opts);
            if (result.pass) {
                std::printf("replay ok\n");
                return 0;
            }
            std::fprintf(stderr, "replay mismatch in %s: %s\n", result.first_mismatch_file.c_str(),
                         result.detail.c_str());
            return 1;
        }
        if (oracle_cmd->parsed()) {
            const synclaw::RunResult result = synclaw::run(oracle_defaults(), opts);
            std::printf("%s\n", result.manifest_path.c_str());
            return result.status;
        }
    } catch (const synclaw::ConfigError& error) {
        std::fprintf(stderr, "config error: %s\n", error.what());
        return 2;
    } catch (const std::exception& error) {
        std::fprintf(stderr, "error: %s\n", error.what());
        return 1;
    }
    return 0;
}
