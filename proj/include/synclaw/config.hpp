// Plain-text key-value experiment configuration with an explicit schema
// version. Parsing is strict (unknown keys rejected, line-anchored errors)
// and parse -> serialize -> parse is the identity on the struct.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "synclaw/excursions.hpp"
#include "synclaw/noise.hpp"

namespace synclaw {

struct IcSpec {
    std::string kind = "zero";  // zero | sine | random
    int index = 1;              // sine mode
    double amplitude = 0.0;     // sine amplitude or random sup norm
    bool operator==(const IcSpec&) const = default;
};

struct ExperimentConfig {
    int schema_version = 1;
    std::string experiment = "oracle";  // oracle|synchro|supersolution|exitprob|excursions
    std::string output_dir;             // default: out_<experiment>
    std::vector<std::uint64_t> seeds{1};

    double grid_L = 1.0;
    int grid_n_cells = 256;

    std::string model_name = "zero";  // zero|burgers|coercive_quadratic|linear
    double model_alpha = 1.0;
    double model_beta = 0.0;
    double model_speed = 1.0;

    std::vector<NoiseMode> noise_modes;
    Psi0Spec psi0;
    double noise_hoelder = 1.0;

    double solver_dt = 1e-3;
    double solver_t_final = 1.0;
    double solver_cfl_safety = 0.9;
    int solver_norm_p = 4;
    int solver_state_stride = 0;
    std::optional<Interval> solver_clip;

    IcSpec ic_u0, ic_v0;

    double synchro_t_burn = 1.0;

    int super_n_u0 = 50;
    double super_u0_sup = 100.0;
    std::vector<double> super_magnitudes{10.0, 100.0, 1000.0};
    double super_t_min = 0.05;

    double exit_t0 = 1.0;
    std::vector<double> exit_hs{0.1, 0.5};
    int exit_n_paths = 10000;
    int exit_n_starts = 32;
    double exit_sde_dt = 0.0;  // 0 = auto

    double exc_pilot_t_final = 50.0;
    int exc_pilot_seed_count = 5;
    double exc_kappa_frac = 0.5;
    double exc_delta = 0.1;
    double exc_eps = 0.1;
    std::optional<CenterSets> exc_radii;  // unset = calibrate from pilots

    bool operator==(const ExperimentConfig&) const = default;
};

struct ConfigError : std::runtime_error {
    int line;  // 0 when not anchored to a source line
    ConfigError(const std::string& what, int line_no)
        : std::runtime_error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + what : what),
          line(line_no) {}
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

/// Semantic validation (regime consistency, radii ordering, ...). Throws
/// ConfigError with the violated invariant named; the line anchors to the
/// offending key when the config came from text.
void validate_config(const ExperimentConfig& cfg,
                     const std::map<std::string, int>* key_lines = nullptr);

/// FNV-1a hash of the canonical serialization, as a 16-digit hex string.
std::string config_hash(const ExperimentConfig& cfg);

FluxModel model_from_config(const ExperimentConfig& cfg);
Field initial_condition(const Grid& grid, const IcSpec& ic, std::uint64_t seed);

/// Parser side-channel: source line of each key from the last parse_config
/// call on this thread (for anchored semantic errors).
const std::map<std::string, int>& last_parse_key_lines();

} // namespace synclaw
