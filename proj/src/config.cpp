#include "synclaw/config.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "synclaw/rng.hpp"

namespace synclaw {

namespace {

thread_local std::map<std::string, int> g_key_lines;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

double parse_double(const std::string& v, const std::string& key, int line) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing garbage");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid number for " + key + ": '" + v + "'", line);
    }
}

long long parse_int(const std::string& v, const std::string& key, int line) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing garbage");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer for " + key + ": '" + v + "'", line);
    }
}

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

const std::map<std::string, int>& last_parse_key_lines() { return g_key_lines; }

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    g_key_lines.clear();
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    std::map<std::string, std::pair<std::string, int>> kv;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value'", line_no);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", line_no);
        if (kv.count(key)) throw ConfigError("duplicate key " + key, line_no);
        kv[key] = {value, line_no};
        g_key_lines[key] = line_no;
    }

    auto take = [&](const std::string& key) -> std::optional<std::pair<std::string, int>> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        auto out = it->second;
        kv.erase(it);
        return out;
    };
    auto dbl = [&](const std::string& key, double& field) {
        if (auto v = take(key)) field = parse_double(v->first, key, v->second);
    };
    auto integer = [&](const std::string& key, int& field) {
        if (auto v = take(key)) field = static_cast<int>(parse_int(v->first, key, v->second));
    };
    auto str = [&](const std::string& key, std::string& field) {
        if (auto v = take(key)) field = v->first;
    };

    integer("schema_version", cfg.schema_version);
    if (cfg.schema_version != 1)
        throw ConfigError("unsupported schema_version " + std::to_string(cfg.schema_version),
                          g_key_lines.count("schema_version") ? g_key_lines["schema_version"] : 0);
    str("experiment", cfg.experiment);
    str("output_dir", cfg.output_dir);
    if (auto v = take("seeds")) {
        cfg.seeds.clear();
        for (const auto& item : split(v->first, ',')) {
            if (item.empty()) throw ConfigError("empty seed entry", v->second);
            cfg.seeds.push_back(static_cast<std::uint64_t>(parse_int(item, "seeds", v->second)));
        }
        if (cfg.seeds.empty()) throw ConfigError("seeds must be nonempty", v->second);
    }
    dbl("grid.L", cfg.grid_L);
    integer("grid.n_cells", cfg.grid_n_cells);
    str("model.name", cfg.model_name);
    dbl("model.alpha", cfg.model_alpha);
    dbl("model.beta", cfg.model_beta);
    dbl("model.speed", cfg.model_speed);
    if (auto v = take("noise.modes")) {
        cfg.noise_modes.clear();
        if (!v->first.empty()) {
            for (const auto& item : split(v->first, ';')) {
                const auto parts = split(item, ':');
                if (parts.size() != 2)
                    throw ConfigError("noise.modes entries must be index:amplitude", v->second);
                NoiseMode m;
                m.index = static_cast<int>(parse_int(parts[0], "noise.modes", v->second));
                m.amplitude = parse_double(parts[1], "noise.modes", v->second);
                cfg.noise_modes.push_back(m);
            }
        }
    }
    str("noise.psi0.time", cfg.psi0.time_profile);
    integer("noise.psi0.index", cfg.psi0.index);
    dbl("noise.psi0.amplitude", cfg.psi0.amplitude);
    dbl("noise.hoelder", cfg.noise_hoelder);
    dbl("solver.dt", cfg.solver_dt);
    dbl("solver.t_final", cfg.solver_t_final);
    dbl("solver.cfl_safety", cfg.solver_cfl_safety);
    integer("solver.norm_p", cfg.solver_norm_p);
    integer("solver.state_stride", cfg.solver_state_stride);
    if (auto v = take("solver.clip")) {
        if (v->first.empty()) {
            cfg.solver_clip.reset();
        } else {
            const auto parts = split(v->first, ':');
            if (parts.size() != 2) throw ConfigError("solver.clip must be lo:hi or empty", v->second);
            cfg.solver_clip = Interval{parse_double(parts[0], "solver.clip", v->second),
                                       parse_double(parts[1], "solver.clip", v->second)};
        }
    }
    auto parse_ic = [&](const std::string& key, IcSpec& ic) {
        if (auto v = take(key)) {
            const auto parts = split(v->first, ':');
            ic.kind = parts.empty() ? "" : parts[0];
            if (ic.kind == "zero") {
                if (parts.size() != 1) throw ConfigError(key + ": zero takes no parameters", v->second);
            } else if (ic.kind == "sine") {
                if (parts.size() != 3) throw ConfigError(key + ": expected sine:index:amplitude", v->second);
                ic.index = static_cast<int>(parse_int(parts[1], key, v->second));
                ic.amplitude = parse_double(parts[2], key, v->second);
            } else if (ic.kind == "random") {
                if (parts.size() != 2) throw ConfigError(key + ": expected random:sup_norm", v->second);
                ic.amplitude = parse_double(parts[1], key, v->second);
            } else {
                throw ConfigError(key + ": unknown kind '" + ic.kind + "'", v->second);
            }
        }
    };
    parse_ic("ic.u0", cfg.ic_u0);
    parse_ic("ic.v0", cfg.ic_v0);
    dbl("synchro.t_burn", cfg.synchro_t_burn);
    integer("super.n_u0", cfg.super_n_u0);
    dbl("super.u0_sup", cfg.super_u0_sup);
    if (auto v = take("super.magnitudes")) {
        cfg.super_magnitudes.clear();
        for (const auto& item : split(v->first, ','))
            cfg.super_magnitudes.push_back(parse_double(item, "super.magnitudes", v->second));
    }
    dbl("super.t_min", cfg.super_t_min);
    dbl("exit.t0", cfg.exit_t0);
    if (auto v = take("exit.hs")) {
        cfg.exit_hs.clear();
        for (const auto& item : split(v->first, ','))
            cfg.exit_hs.push_back(parse_double(item, "exit.hs", v->second));
    }
    integer("exit.n_paths", cfg.exit_n_paths);
    integer("exit.n_starts", cfg.exit_n_starts);
    dbl("exit.sde_dt", cfg.exit_sde_dt);
    dbl("exc.pilot_t_final", cfg.exc_pilot_t_final);
    integer("exc.pilot_seed_count", cfg.exc_pilot_seed_count);
    dbl("exc.kappa_frac", cfg.exc_kappa_frac);
    dbl("exc.delta", cfg.exc_delta);
    dbl("exc.eps", cfg.exc_eps);
    if (auto v = take("exc.radii")) {
        if (v->first == "auto" || v->first.empty()) {
            cfg.exc_radii.reset();
        } else {
            const auto parts = split(v->first, ':');
            if (parts.size() != 5)
                throw ConfigError("exc.radii must be auto or R1:R2:R3:Rbar1:Rbar2", v->second);
            CenterSets c;
            c.p = cfg.solver_norm_p;
            c.R1 = parse_double(parts[0], "exc.radii", v->second);
            c.R2 = parse_double(parts[1], "exc.radii", v->second);
            c.R3 = parse_double(parts[2], "exc.radii", v->second);
            c.Rbar1 = parse_double(parts[3], "exc.radii", v->second);
            c.Rbar2 = parse_double(parts[4], "exc.radii", v->second);
            cfg.exc_radii = c;
        }
    }

    if (!kv.empty()) {
        const auto& first = *kv.begin();
        throw ConfigError("unknown key " + first.first, first.second.second);
    }
    if (cfg.exc_radii) cfg.exc_radii->p = cfg.solver_norm_p;
    if (cfg.output_dir.empty()) cfg.output_dir = "out_" + cfg.experiment;
    validate_config(cfg, &g_key_lines);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "schema_version = " << cfg.schema_version << "\n";
    out << "experiment = " << cfg.experiment << "\n";
    out << "output_dir = " << cfg.output_dir << "\n";
    out << "seeds = ";
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
        out << (i ? "," : "") << cfg.seeds[i];
    out << "\n";
    out << "grid.L = " << fmt_double(cfg.grid_L) << "\n";
    out << "grid.n_cells = " << cfg.grid_n_cells << "\n";
    out << "model.name = " << cfg.model_name << "\n";
    out << "model.alpha = " << fmt_double(cfg.model_alpha) << "\n";
    out << "model.beta = " << fmt_double(cfg.model_beta) << "\n";
    out << "model.speed = " << fmt_double(cfg.model_speed) << "\n";
    out << "noise.modes = ";
    for (std::size_t i = 0; i < cfg.noise_modes.size(); ++i)
        out << (i ? ";" : "") << cfg.noise_modes[i].index << ":"
            << fmt_double(cfg.noise_modes[i].amplitude);
    out << "\n";
    out << "noise.psi0.time = " << cfg.psi0.time_profile << "\n";
    out << "noise.psi0.index = " << cfg.psi0.index << "\n";
    out << "noise.psi0.amplitude = " << fmt_double(cfg.psi0.amplitude) << "\n";
    out << "noise.hoelder = " << fmt_double(cfg.noise_hoelder) << "\n";
    out << "solver.dt = " << fmt_double(cfg.solver_dt) << "\n";
    out << "solver.t_final = " << fmt_double(cfg.solver_t_final) << "\n";
    out << "solver.cfl_safety = " << fmt_double(cfg.solver_cfl_safety) << "\n";
    out << "solver.norm_p = " << cfg.solver_norm_p << "\n";
    out << "solver.state_stride = " << cfg.solver_state_stride << "\n";
    out << "solver.clip = ";
    if (cfg.solver_clip)
        out << fmt_double(cfg.solver_clip->lo) << ":" << fmt_double(cfg.solver_clip->hi);
    out << "\n";
    auto ic_str = [](const IcSpec& ic) {
        if (ic.kind == "zero") return std::string("zero");
        if (ic.kind == "sine")
            return "sine:" + std::to_string(ic.index) + ":" + fmt_double(ic.amplitude);
        return "random:" + fmt_double(ic.amplitude);
    };
    out << "ic.u0 = " << ic_str(cfg.ic_u0) << "\n";
    out << "ic.v0 = " << ic_str(cfg.ic_v0) << "\n";
    out << "synchro.t_burn = " << fmt_double(cfg.synchro_t_burn) << "\n";
    out << "super.n_u0 = " << cfg.super_n_u0 << "\n";
    out << "super.u0_sup = " << fmt_double(cfg.super_u0_sup) << "\n";
    out << "super.magnitudes = ";
    for (std::size_t i = 0; i < cfg.super_magnitudes.size(); ++i)
        out << (i ? "," : "") << fmt_double(cfg.super_magnitudes[i]);
    out << "\n";
    out << "super.t_min = " << fmt_double(cfg.super_t_min) << "\n";
    out << "exit.t0 = " << fmt_double(cfg.exit_t0) << "\n";
    out << "exit.hs = ";
    for (std::size_t i = 0; i < cfg.exit_hs.size(); ++i)
        out << (i ? "," : "") << fmt_double(cfg.exit_hs[i]);
    out << "\n";
    out << "exit.n_paths = " << cfg.exit_n_paths << "\n";
    out << "exit.n_starts = " << cfg.exit_n_starts << "\n";
    out << "exit.sde_dt = " << fmt_double(cfg.exit_sde_dt) << "\n";
    out << "exc.pilot_t_final = " << fmt_double(cfg.exc_pilot_t_final) << "\n";
    out << "exc.pilot_seed_count = " << cfg.exc_pilot_seed_count << "\n";
    out << "exc.kappa_frac = " << fmt_double(cfg.exc_kappa_frac) << "\n";
    out << "exc.delta = " << fmt_double(cfg.exc_delta) << "\n";
    out << "exc.eps = " << fmt_double(cfg.exc_eps) << "\n";
    out << "exc.radii = ";
    if (cfg.exc_radii)
        out << fmt_double(cfg.exc_radii->R1) << ":" << fmt_double(cfg.exc_radii->R2) << ":"
            << fmt_double(cfg.exc_radii->R3) << ":" << fmt_double(cfg.exc_radii->Rbar1) << ":"
            << fmt_double(cfg.exc_radii->Rbar2);
    else
        out << "auto";
    out << "\n";
    return out.str();
}

void validate_config(const ExperimentConfig& cfg, const std::map<std::string, int>* key_lines) {
    auto line_of = [&](const std::string& key) {
        if (key_lines == nullptr) return 0;
        auto it = key_lines->find(key);
        return it == key_lines->end() ? 0 : it->second;
    };
    auto fail = [&](const std::string& what, const std::string& key) {
        throw ConfigError(what, line_of(key));
    };

    static const char* kExperiments[] = {"oracle", "synchro", "supersolution", "exitprob", "excursions"};
    bool known = false;
    for (const char* e : kExperiments) known = known || cfg.experiment == e;
    if (!known) fail("unknown experiment '" + cfg.experiment + "'", "experiment");
    if (!(cfg.grid_L > 0.0)) fail("grid.L must be positive", "grid.L");
    if (cfg.grid_n_cells < 3) fail("grid.n_cells must be >= 3", "grid.n_cells");
    if (!(cfg.solver_dt > 0.0)) fail("solver.dt must be positive", "solver.dt");
    if (!(cfg.solver_t_final > 0.0)) fail("solver.t_final must be positive", "solver.t_final");
    if (!(cfg.solver_cfl_safety > 0.0 && cfg.solver_cfl_safety <= 1.0))
        fail("solver.cfl_safety must lie in (0, 1]", "solver.cfl_safety");
    if (cfg.solver_norm_p < 2 || cfg.solver_norm_p % 2 != 0)
        fail("solver.norm_p must be an even integer >= 2", "solver.norm_p");
    if (cfg.seeds.empty()) fail("seeds must be nonempty", "seeds");

    if (cfg.model_name != "zero" && cfg.model_name != "burgers" &&
        cfg.model_name != "coercive_quadratic" && cfg.model_name != "linear")
        fail("unknown model '" + cfg.model_name + "'", "model.name");
    if (cfg.model_name == "coercive_quadratic" && !(cfg.model_alpha > 0.0))
        fail("model.alpha must be positive", "model.alpha");
    for (const auto& m : cfg.noise_modes)
        if (m.index < 1) fail("noise mode index must be >= 1", "noise.modes");
    if (cfg.psi0.time_profile != "zero" && cfg.psi0.time_profile != "one")
        fail("noise.psi0.time must be zero or one", "noise.psi0.time");

    const FluxModel model = model_from_config(cfg);
    if (cfg.experiment == "supersolution" && !model.coercivity())
        fail("supersolution requires a coercive model (invariant: regime consistency)", "model.name");
    if (cfg.experiment == "excursions" && model.growth_exponent() == kPInf)
        fail("excursions requires a finite growth exponent (invariant: regime consistency)", "model.name");
    if (cfg.experiment == "exitprob") {
        if (cfg.exit_n_paths <= 0) fail("exit.n_paths must be positive", "exit.n_paths");
        if (cfg.exit_n_starts <= 0) fail("exit.n_starts must be positive", "exit.n_starts");
        for (double h : cfg.exit_hs)
            if (!(h > 0.0)) fail("exit.hs entries must be positive", "exit.hs");
        double h_max = 0.0;
        for (double h : cfg.exit_hs) h_max = std::max(h_max, h);
        if (cfg.exit_t0 + h_max > cfg.solver_t_final + 1e-12)
            fail("exit.t0 + max(exit.hs) exceeds solver.t_final", "exit.t0");
    }
    if (cfg.exc_radii) {
        const CenterSets& r = *cfg.exc_radii;
        if (!(r.R1 > 0.0)) fail("invariant violated: R1 > 0", "exc.radii");
        if (!(r.R1 < r.R2)) fail("invariant violated: R1 < R2", "exc.radii");
        if (!(r.R2 < r.R3)) fail("invariant violated: R2 < R3", "exc.radii");
        if (!(r.Rbar1 > 0.0)) fail("invariant violated: Rbar1 > 0", "exc.radii");
        if (!(r.Rbar1 < r.Rbar2)) fail("invariant violated: Rbar1 < Rbar2", "exc.radii");
    }
    if (cfg.experiment == "excursions") {
        if (!(cfg.exc_kappa_frac > 0.0 && cfg.exc_kappa_frac <= 0.5))
            fail("exc.kappa_frac must lie in (0, 1/2]", "exc.kappa_frac");
        if (cfg.exc_pilot_seed_count < 1 && !cfg.exc_radii)
            fail("exc.pilot_seed_count must be >= 1 for calibration", "exc.pilot_seed_count");
    }
    // psi0 must stay bounded on the horizon (time-bounded forcing contract)
    const Grid probe = build_grid(cfg.grid_L, 8);
    NoiseSpec spec = make_noise_spec(probe, {}, cfg.psi0, cfg.noise_hoelder);
    if (!std::isfinite(spec.psi0_sup(cfg.solver_t_final)))
        fail("psi0 is unbounded on the simulated horizon", "noise.psi0.amplitude");
}

std::string config_hash(const ExperimentConfig& cfg) {
    const std::string text = serialize_config(cfg);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

FluxModel model_from_config(const ExperimentConfig& cfg) {
    if (cfg.model_name == "burgers") return burgers_model();
    if (cfg.model_name == "coercive_quadratic")
        return coercive_quadratic_model(cfg.model_alpha, cfg.model_beta);
    if (cfg.model_name == "linear") return linear_flux_model(cfg.model_speed);
    return zero_flux_model();
}

Field initial_condition(const Grid& grid, const IcSpec& ic, std::uint64_t seed) {
    if (ic.kind == "zero") return make_field(grid);
    if (ic.kind == "sine") {
        const double k = ic.index;
        return sample_field(grid, [&](double x) {
            return ic.amplitude * std::sin(k * 3.14159265358979323846 * x / grid.length);
        });
    }
    if (ic.kind == "random") return random_initial_condition(grid, ic.amplitude, seed);
    throw std::invalid_argument("unknown initial condition kind " + ic.kind);
}

} // namespace synclaw
