#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include <json.hpp>

#include "synclaw/experiments.hpp"

using namespace synclaw;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempRoot {
    fs::path path;
    TempRoot() {
        path = fs::temp_directory_path() /
               ("synclaw_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempRoot() { fs::remove_all(path); }
};

ExperimentConfig small_oracle() {
    ExperimentConfig cfg;
    cfg.experiment = "oracle";
    cfg.model_name = "zero";
    cfg.grid_n_cells = 64;
    cfg.solver_dt = 1e-3;
    cfg.solver_t_final = 0.2;
    cfg.output_dir = "out_oracle";
    return cfg;
}

ExperimentConfig small_synchro() {
    ExperimentConfig cfg;
    cfg.experiment = "synchro";
    cfg.model_name = "burgers";
    cfg.grid_n_cells = 32;
    cfg.solver_dt = 2e-3;
    cfg.solver_t_final = 2.0;
    cfg.seeds = {1, 2};
    cfg.noise_modes = {{1, 0.3}};
    cfg.psi0.time_profile = "one";
    cfg.psi0.index = 1;
    cfg.psi0.amplitude = 0.5;
    cfg.ic_u0 = {"sine", 1, 1.0};
    cfg.ic_v0 = {"zero", 1, 0.0};
    cfg.synchro_t_burn = 0.5;
    cfg.output_dir = "out_synchro";
    return cfg;
}

json read_json(const std::string& path) { return json::parse(read_file(path)); }

} // namespace

TEST_CASE("oracle experiment: smoke and manifest") {
    TempRoot root;
    RunOptions opts;
    opts.output_root = root.path.string();
    const RunResult result = run(small_oracle(), opts);
    CHECK(result.status == 0);
    const Manifest manifest = load_manifest(result.manifest_path);
    CHECK(manifest.files.size() >= 3);
    for (const auto& f : manifest.files) {
        CHECK(fs::exists(fs::path(result.output_dir) / f.name));
        CHECK(hash_file((fs::path(result.output_dir) / f.name).string()) == f.hash);
    }
    const json summary = read_json(result.output_dir + "/summary.json");
    CHECK(summary.at("decay").at("pass").get<bool>());
    CHECK(summary.contains("config_hash"));
}

TEST_CASE("oracle with snapshots: trajectory dump and binary round trip") {
    TempRoot root;
    RunOptions opts;
    opts.output_root = root.path.string();
    ExperimentConfig cfg = small_oracle();
    cfg.solver_state_stride = 50;
    const RunResult result = run(cfg, opts);
    REQUIRE(result.status == 0);
    CHECK(fs::exists(fs::path(result.output_dir) / "trajectory.csv"));
    const StateSnapshots snaps = read_states_binary(result.output_dir + "/states.bin");
    CHECK(snaps.n_cells == cfg.grid_n_cells);
    CHECK(snaps.steps.front() == 0);
    CHECK(snaps.steps.back() == 200);
    CHECK(snaps.states.size() == snaps.steps.size());
    // final snapshot tracks the spectral decay
    double sup = 0.0;
    for (double v : snaps.states.back()) sup = std::max(sup, std::abs(v));
    CHECK(sup == doctest::Approx(std::exp(-9.8696 * 0.2)).epsilon(0.05));
}

TEST_CASE("synchro experiment: per-seed fan-out") {
    TempRoot root;
    RunOptions opts;
    opts.output_root = root.path.string();
    const RunResult result = run(small_synchro(), opts);
    REQUIRE(result.status == 0);
    CHECK(fs::exists(fs::path(result.output_dir) / "decay_seed1.csv"));
    CHECK(fs::exists(fs::path(result.output_dir) / "decay_seed2.csv"));
    const json summary = read_json(result.output_dir + "/summary.json");
    REQUIRE(summary.at("per_seed").size() == 2);
    for (const auto& entry : summary.at("per_seed")) {
        CHECK(entry.at("violations").get<long>() == 0);
        CHECK(entry.at("lambda_hat").get<double>() < 0.0);
    }
}

TEST_CASE("replay: pass, tamper detection, worker invariance") {
    TempRoot root;
    RunOptions opts;
    opts.output_root = root.path.string();
    const RunResult result = run(small_synchro(), opts);
    REQUIRE(result.status == 0);

    SUBCASE("replay passes") {
        const ReplayResult rep = replay(result.manifest_path, opts);
        CHECK(rep.pass);
    }
    SUBCASE("replay with more workers still matches") {
        RunOptions opts8 = opts;
        opts8.workers = 8;
        const ReplayResult rep = replay(result.manifest_path, opts8);
        CHECK(rep.pass);
    }
    SUBCASE("edited seed is caught on the decay series") {
        Manifest manifest = load_manifest(result.manifest_path);
        std::string text = manifest.config_text;
        const auto pos = text.find("seeds = 1,2");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 11, "seeds = 9,2");
        json j = json::parse(read_file(result.manifest_path));
        j["config_text"] = text;
        const std::string tampered = (fs::path(result.output_dir) / "tampered.json").string();
        write_text(tampered, j.dump(2) + "\n");
        const ReplayResult rep = replay(tampered, opts);
        CHECK_FALSE(rep.pass);
        CHECK(rep.first_mismatch_file.find("decay_seed") == 0);
        CHECK_FALSE(rep.detail.empty());
    }
}

TEST_CASE("worker count does not change the artifacts") {
    TempRoot root;
    ExperimentConfig cfg = small_synchro();
    std::vector<std::string> hashes;
    for (int workers : {1, 2, 8}) {
        RunOptions opts;
        opts.output_root = (root.path / ("w" + std::to_string(workers))).string();
        opts.workers = workers;
        const RunResult result = run(cfg, opts);
        REQUIRE(result.status == 0);
        const Manifest manifest = load_manifest(result.manifest_path);
        std::string all;
        for (const auto& f : manifest.files) all += f.name + ":" + f.hash + ";";
        hashes.push_back(all);
    }
    CHECK(hashes[0] == hashes[1]);
    CHECK(hashes[0] == hashes[2]);
}

TEST_CASE("invalid config fails with a nonzero status before writing artifacts") {
    ExperimentConfig cfg = small_synchro();
    cfg.solver_cfl_safety = 2.0;
    TempRoot root;
    RunOptions opts;
    opts.output_root = root.path.string();
    CHECK_THROWS_AS(run(cfg, opts), ConfigError);
}

TEST_CASE("solver failure yields a partial manifest with a failure record") {
    ExperimentConfig cfg = small_synchro();
    cfg.seeds = {1};
    cfg.solver_dt = 0.05;  // hopeless CFL for burgers with unit data
    TempRoot root;
    RunOptions opts;
    opts.output_root = root.path.string();
    const RunResult result = run(cfg, opts);
    CHECK(result.status != 0);
    CHECK(fs::exists(fs::path(result.output_dir) / "failure.json"));
    const Manifest manifest = load_manifest(result.manifest_path);
    bool has_failure = false;
    for (const auto& f : manifest.files) has_failure = has_failure || f.name == "failure.json";
    CHECK(has_failure);
}
