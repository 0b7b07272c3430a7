#include "synclaw/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "synclaw/exit_prob.hpp"
#include "synclaw/parallel.hpp"
#include "synclaw/rng.hpp"
#include "synclaw/synchro.hpp"

namespace synclaw {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr const char* kDefCSignNote =
    "credit c(T,B) is evaluated as -log(1 - c*exp(-(C + B^2)/T)); the exponent sign and the "
    "squared drift bound follow the exit-probability lower bound so the credit stays finite "
    "and positive";

int default_state_stride(const ExperimentConfig& cfg) {
    if (cfg.solver_state_stride > 0) return cfg.solver_state_stride;
    const int n_steps = static_cast<int>(std::llround(cfg.solver_t_final / cfg.solver_dt));
    return std::max(1, n_steps / 400);
}

int csv_stride(std::size_t n_rows, std::size_t target = 2000) {
    return static_cast<int>(std::max<std::size_t>(1, n_rows / target));
}

NoiseSpec noise_from_config(const ExperimentConfig& cfg, const Grid& grid) {
    return make_noise_spec(grid, cfg.noise_modes, cfg.psi0, cfg.noise_hoelder);
}

bool has_noise(const ExperimentConfig& cfg) {
    if (!cfg.noise_modes.empty()) return true;
    return cfg.psi0.time_profile != "zero" && cfg.psi0.amplitude != 0.0;
}

SolverConfig solver_from_config(const ExperimentConfig& cfg) {
    SolverConfig sc;
    sc.dt = cfg.solver_dt;
    sc.t_final = cfg.solver_t_final;
    sc.cfl_safety = cfg.solver_cfl_safety;
    sc.clip_range = cfg.solver_clip;
    sc.norm_p = cfg.solver_norm_p;
    sc.state_stride = cfg.solver_state_stride;
    return sc;
}

PairTrajectory run_pair(const ExperimentConfig& cfg, const Grid& grid, const FluxModel& model,
                        const NoiseSpec& spec, std::uint64_t seed, double t_final,
                        int state_stride) {
    SolverConfig sc = solver_from_config(cfg);
    sc.t_final = t_final;
    sc.state_stride = state_stride;
    const int n_steps = static_cast<int>(std::llround(t_final / sc.dt));
    NoisePath path = sample_path(spec, seed, sc.dt, n_steps);
    const Field u0 = initial_condition(grid, cfg.ic_u0, derive_stream(seed, 0xa0));
    const Field v0 = initial_condition(grid, cfg.ic_v0, derive_stream(seed, 0xb0));
    PairTrajectory pair = couple_evolve(u0, v0, model, &spec, &path, sc, seed);
    pair.config_hash = config_hash(cfg);
    return pair;
}

// ---------------------------------------------------------------- oracle ---

json run_oracle(const ExperimentConfig& cfg, const RunOptions& opts, const std::string& dir,
                std::vector<std::string>& files) {
    (void)opts;
    const FluxModel model = zero_flux_model();
    json summary;

    // decay against the first Dirichlet mode
    {
        const Grid grid = build_grid(cfg.grid_L, cfg.grid_n_cells);
        const Field u0 = sample_field(grid, [&](double x) { return std::sin(kPi * x / grid.length); });
        SolverConfig sc = solver_from_config(cfg);
        const Trajectory traj = evolve(u0, model, nullptr, nullptr, sc);
        write_trajectory_csv(dir + "/trajectory.csv", traj);
        files.push_back("trajectory.csv");
        if (sc.state_stride > 0) {
            write_states_binary(dir + "/states.bin", traj);
            files.push_back("states.bin");
        }
        const double rate = kPi * kPi / (grid.length * grid.length);
        CsvTable table;
        table.header = {"t", "l2", "oracle_l2", "rel_err"};
        const double l2_0 = traj.norm_l2.front();
        const int stride = csv_stride(traj.times.size());
        double rel_err_final = 0.0;
        for (std::size_t k = 0; k < traj.times.size(); ++k) {
            const double exact = l2_0 * std::exp(-rate * traj.times[k]);
            const double rel = exact > 0.0 ? std::abs(traj.norm_l2[k] - exact) / exact : 0.0;
            if (k % static_cast<std::size_t>(stride) == 0 || k + 1 == traj.times.size())
                table.rows.push_back({traj.times[k], traj.norm_l2[k], exact, rel});
            if (k + 1 == traj.times.size()) rel_err_final = rel;
        }
        write_csv(dir + "/oracle_decay.csv", table);
        files.push_back("oracle_decay.csv");
        summary["decay"] = {{"t_check", cfg.solver_t_final},
                            {"l2_rel_err", rel_err_final},
                            {"pass", rel_err_final <= 0.05}};

        SvgPlot plot;
        plot.title = "Heat-mode L2 decay";
        plot.x_label = "t";
        plot.y_label = "||u||_2";
        plot.log_y = true;
        SvgSeries num{"numeric", "#1f77b4", {}, {}}, ora{"closed form", "#d62728", {}, {}};
        for (const auto& row : table.rows) {
            num.x.push_back(row[0]);
            num.y.push_back(row[1]);
            ora.x.push_back(row[0]);
            ora.y.push_back(row[2]);
        }
        plot.series = {num, ora};
        write_svg_plot(dir + "/plot_decay.svg", plot);
        files.push_back("plot_decay.svg");
    }

    // refinement ladders
    CsvTable ladder;
    ladder.header = {"kind", "param", "linf_err", "order"};
    const double t_ref = 0.2;
    std::vector<double> dx_errs, dt_errs;
    {
        const int ns[] = {16, 32, 64};
        for (int n : ns) {
            const Grid grid = build_grid(cfg.grid_L, n);
            const Field u0 = sample_field(grid, [&](double x) { return std::sin(kPi * x / grid.length); });
            SolverConfig sc;
            sc.dt = 0.05 * grid.dx * grid.dx;
            sc.t_final = t_ref;
            const Trajectory traj = evolve(u0, model, nullptr, nullptr, sc);
            const Field& uT = traj.final_state();
            double err = 0.0;
            const double rate = kPi * kPi / (grid.length * grid.length);
            for (int i = 0; i < n; ++i) {
                const double exact = std::exp(-rate * t_ref) *
                                     std::sin(kPi * grid.centers[static_cast<std::size_t>(i)] / grid.length);
                err = std::max(err, std::abs(uT[i] - exact));
            }
            dx_errs.push_back(err);
            const double order = dx_errs.size() > 1
                                     ? std::log2(dx_errs[dx_errs.size() - 2] / err)
                                     : 0.0;
            ladder.rows.push_back({0.0, static_cast<double>(n), err, order});
        }
    }
    {
        const int n = 64;
        const Grid grid = build_grid(cfg.grid_L, n);
        const Field u0 = sample_field(grid, [&](double x) { return std::sin(kPi * x / grid.length); });
        const double lam_h = 2.0 / (grid.dx * grid.dx) *
                             (1.0 - std::cos(kPi * grid.dx / grid.length));
        const double dts[] = {4e-3, 2e-3, 1e-3, 5e-4};
        for (double dt : dts) {
            SolverConfig sc;
            sc.dt = dt;
            sc.t_final = t_ref;
            const Trajectory traj = evolve(u0, model, nullptr, nullptr, sc);
            const Field& uT = traj.final_state();
            double err = 0.0;
            for (int i = 0; i < n; ++i) {
                const double semi = std::exp(-lam_h * t_ref) * u0[i];
                err = std::max(err, std::abs(uT[i] - semi));
            }
            dt_errs.push_back(err);
            const double order = dt_errs.size() > 1
                                     ? std::log2(dt_errs[dt_errs.size() - 2] / err)
                                     : 0.0;
            ladder.rows.push_back({1.0, dt, err, order});
        }
    }
    write_csv(dir + "/oracle_ladder.csv", ladder);
    files.push_back("oracle_ladder.csv");

    double dx_order = kPInf, dt_order = kPInf;
    for (std::size_t i = 1; i < dx_errs.size(); ++i)
        dx_order = std::min(dx_order, std::log2(dx_errs[i - 1] / dx_errs[i]));
    for (std::size_t i = 1; i < dt_errs.size(); ++i)
        dt_order = std::min(dt_order, std::log2(dt_errs[i - 1] / dt_errs[i]));
    summary["ladder"] = {{"dx_order_min", dx_order},
                         {"dt_order_min", dt_order},
                         {"dx_pass", dx_order >= 1.8},
                         {"dt_pass", dt_order >= 0.9}};
    return summary;
}

// --------------------------------------------------------------- synchro ---

json run_synchro(const ExperimentConfig& cfg, const RunOptions& opts, const std::string& dir,
                 std::vector<std::string>& files) {
    const Grid grid = build_grid(cfg.grid_L, cfg.grid_n_cells);
    const FluxModel model = model_from_config(cfg);
    const NoiseSpec spec = noise_from_config(cfg, grid);
    const int n_seeds = static_cast<int>(cfg.seeds.size());

    struct SeedResult {
        PairTrajectory pair;
        LyapunovFit fit;
        long violations = 0;
    };
    std::vector<SeedResult> results(static_cast<std::size_t>(n_seeds));
    parallel_for_ordered(n_seeds, opts.workers, [&](int s) {
        SeedResult r;
        r.pair = run_pair(cfg, grid, model, spec, cfg.seeds[static_cast<std::size_t>(s)],
                          cfg.solver_t_final, 0);
        r.fit = estimate_lyapunov(r.pair, cfg.synchro_t_burn);
        const double tol = 1e-10 * r.pair.w_l1.front();
        for (std::size_t k = 0; k + 1 < r.pair.w_l1.size(); ++k)
            if (r.pair.w_l1[k + 1] > r.pair.w_l1[k] + tol) ++r.violations;
        results[static_cast<std::size_t>(s)] = std::move(r);
    });

    json per_seed = json::array();
    SvgPlot plot;
    plot.title = "log ||w||_1 decay";
    plot.x_label = "t";
    plot.y_label = "||w||_1";
    plot.log_y = true;
    const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    for (int s = 0; s < n_seeds; ++s) {
        const SeedResult& r = results[static_cast<std::size_t>(s)];
        const std::uint64_t seed = cfg.seeds[static_cast<std::size_t>(s)];
        CsvTable table;
        table.header = {"t", "w_l1", "boundary_diss", "sup_norm"};
        const int stride = csv_stride(r.pair.times.size());
        for (std::size_t k = 0; k < r.pair.times.size(); ++k) {
            if (k % static_cast<std::size_t>(stride) != 0 && k + 1 != r.pair.times.size()) continue;
            table.rows.push_back({r.pair.times[k], r.pair.w_l1[k],
                                  k > 0 ? r.pair.boundary_diss[k - 1] : 0.0,
                                  r.pair.sup_norms[k]});
        }
        const std::string name = "decay_seed" + std::to_string(seed) + ".csv";
        write_csv(dir + "/" + name, table);
        files.push_back(name);

        json entry;
        entry["seed"] = seed;
        entry["violations"] = r.violations;
        entry["w_l1_first"] = r.pair.w_l1.front();
        entry["w_l1_last"] = r.pair.w_l1.back();
        if (r.fit.status == LyapunovFit::Status::ok) {
            entry["status"] = "ok";
            entry["lambda_hat"] = r.fit.lambda_hat;
            entry["stderr"] = r.fit.stderr_slope;
        } else {
            entry["status"] = "synchronised below resolution";
            entry["t_hit"] = r.fit.t_hit;
        }
        per_seed.push_back(entry);

        if (s < 4) {
            SvgSeries series;
            series.label = "seed " + std::to_string(seed);
            series.color = palette[s];
            for (std::size_t k = 0; k < r.pair.times.size(); ++k) {
                series.x.push_back(r.pair.times[k]);
                series.y.push_back(r.pair.w_l1[k]);
            }
            plot.series.push_back(series);
        }
    }
    write_svg_plot(dir + "/plot_wl1.svg", plot);
    files.push_back("plot_wl1.svg");

    json summary;
    summary["per_seed"] = per_seed;
    long total_violations = 0;
    for (const auto& r : results) total_violations += r.violations;
    summary["total_contraction_violations"] = total_violations;
    return summary;
}

// --------------------------------------------------------- supersolution ---

json run_supersolution(const ExperimentConfig& cfg, const RunOptions& opts,
                       const std::string& dir, std::vector<std::string>& files) {
    const Grid grid = build_grid(cfg.grid_L, cfg.grid_n_cells);
    const FluxModel model = model_from_config(cfg);
    const NoiseSpec spec = noise_from_config(cfg, grid);
    const bool noisy = has_noise(cfg);

    SolverConfig sc = solver_from_config(cfg);
    sc.state_stride = 1;
    const int n_steps = static_cast<int>(std::llround(sc.t_final / sc.dt));

    // z statistics on the shared path (identically zero without forcing)
    ZStats zs;
    NoisePath shared_path = sample_path(spec, cfg.seeds.front(), sc.dt, n_steps);
    if (noisy) {
        const ZTrajectory zt = evolve_z(spec, shared_path, grid);
        zs = z_stats_for_horizon(zt, sc.t_final);
    }
    const SuperSolutionParams params = supersolution_params(model, sc.t_final, zs, grid);
    double phi_sup = 0.0;
    for (double x : grid.centers) phi_sup = std::max(phi_sup, params.phi_plus(cfg.super_t_min, x));
    const double tol = 1e-6 * phi_sup;

    struct IcResult {
        ComparisonReport report;
    };
    std::vector<IcResult> results(static_cast<std::size_t>(cfg.super_n_u0));
    parallel_for_ordered(cfg.super_n_u0, opts.workers, [&](int idx) {
        const Field u0 = random_initial_condition(
            grid, cfg.super_u0_sup, derive_stream(cfg.seeds.front(), 0x5e5e, static_cast<std::uint64_t>(idx)));
        const Trajectory traj = evolve(u0, model, noisy ? &spec : nullptr,
                                       noisy ? &shared_path : nullptr, sc);
        results[static_cast<std::size_t>(idx)].report =
            verify_comparison(traj, params, cfg.super_t_min, tol);
    });

    CsvTable table;
    table.header = {"ic_index", "pass", "worst_violation", "t_worst", "cell_worst", "side"};
    int pass_count = 0;
    double worst = 0.0;
    for (int idx = 0; idx < cfg.super_n_u0; ++idx) {
        const auto& rep = results[static_cast<std::size_t>(idx)].report;
        pass_count += rep.pass ? 1 : 0;
        worst = std::max(worst, rep.worst_violation);
        table.rows.push_back({static_cast<double>(idx), rep.pass ? 1.0 : 0.0, rep.worst_violation,
                              rep.t_worst, static_cast<double>(rep.cell_worst),
                              static_cast<double>(rep.side_worst)});
    }
    write_csv(dir + "/comparison.csv", table);
    files.push_back("comparison.csv");

    SolverConfig sc_long = sc;
    sc_long.t_final = std::max(2.0, sc.t_final);
    sc_long.state_stride = 0;
    const PathwiseBoundStats stats = pathwise_bound_stats(
        model, grid, noisy ? &spec : nullptr, sc_long, cfg.seeds, cfg.super_magnitudes, 2,
        opts.workers);
    // a-priori scale against which initial-magnitude memory is measured
    const double envelope_scale = params.phi_plus(1.0, grid.length);
    const double envelope_rel_spread = stats.abs_spread_across_magnitudes / envelope_scale;

    json summary;
    summary["envelope"] = {{"a", params.a}, {"b", params.b}, {"tol", tol},
                           {"t_min", cfg.super_t_min}, {"z_sup", params.z_sup},
                           {"z_grad_sum", params.z_grad_sum}};
    summary["comparison"] = {{"n_u0", cfg.super_n_u0},
                             {"pass_count", pass_count},
                             {"all_pass", pass_count == cfg.super_n_u0},
                             {"worst_violation", worst}};
    summary["pathwise_bound"] = {{"magnitudes", stats.magnitudes},
                                 {"c_hat_per_magnitude", stats.c_hat_per_magnitude},
                                 {"c_hat", stats.c_hat},
                                 {"c_B_hat", stats.c_B_hat},
                                 {"raw_rel_spread", stats.rel_spread_across_magnitudes},
                                 {"envelope_scale", envelope_scale},
                                 {"envelope_rel_spread", envelope_rel_spread}};
    return summary;
}

// -------------------------------------------------------------- exitprob ---

json run_exitprob(const ExperimentConfig& cfg, const RunOptions& opts, const std::string& dir,
                  std::vector<std::string>& files) {
    const Grid grid = build_grid(cfg.grid_L, cfg.grid_n_cells);
    const FluxModel model = model_from_config(cfg);
    const NoiseSpec spec = noise_from_config(cfg, grid);
    const int stride = default_state_stride(cfg);
    const PairTrajectory pair =
        run_pair(cfg, grid, model, spec, cfg.seeds.front(), cfg.solver_t_final, stride);
    const GirsanovBound gb = make_girsanov_bound(grid);

    CsvTable table;
    table.header = {"h", "p_kernel", "p_mc", "stderr", "argmin_start", "b_sup",
                    "girsanov_bound", "duality_gap", "duality_allowance", "duality_pass",
                    "mc_bound_pass", "kernel_bound_pass", "strict_pass", "strict_lhs", "strict_rhs"};
    json per_h = json::array();
    std::vector<double> hs_sorted = cfg.exit_hs;
    std::sort(hs_sorted.begin(), hs_sorted.end());
    for (double h : hs_sorted) {
        const KernelMassLoss kernel = kernel_mass_loss(pair, model, cfg.exit_t0, h, opts.workers);
        const ExitEstimate est = estimate_p_inf(pair, model, cfg.exit_t0, h, cfg.exit_n_starts,
                                                cfg.exit_n_paths, cfg.seeds.front(),
                                                cfg.exit_sde_dt, opts.workers);
        const double b_sup = pair_secant_sup(pair, model, cfg.exit_t0, h);
        const double bound = gb.value(std::min(h, 1.0), b_sup);
        const BoundAudit mc_audit = bound_audit(est, bound);
        const bool kernel_bound_pass = kernel.p_hat >= bound;
        const double gap = std::abs(est.p_hat - kernel.p_hat);
        const double allowance = 3.0 * (est.stderr_ + 10.0 * grid.dx);
        const bool duality_pass = gap <= allowance;
        const ContractionAudit strict = strict_contraction_audit(pair, cfg.exit_t0, h, kernel.p_hat);

        table.rows.push_back({h, kernel.p_hat, est.p_hat, est.stderr_, est.argmin_start, b_sup,
                              bound, gap, allowance, duality_pass ? 1.0 : 0.0,
                              mc_audit.pass ? 1.0 : 0.0, kernel_bound_pass ? 1.0 : 0.0,
                              strict.pass ? 1.0 : 0.0, strict.lhs, strict.rhs});
        json entry;
        entry["h"] = h;
        entry["p_kernel"] = kernel.p_hat;
        entry["p_mc"] = est.p_hat;
        entry["stderr"] = est.stderr_;
        entry["argmin_start"] = est.argmin_start;
        entry["b_sup"] = b_sup;
        entry["girsanov_bound"] = bound;
        entry["bound_numerically_zero"] = mc_audit.bound_numerically_zero;
        entry["duality"] = {{"gap", gap}, {"allowance", allowance}, {"pass", duality_pass}};
        entry["audits"] = {{"mc_bound", mc_audit.pass},
                           {"kernel_bound", kernel_bound_pass},
                           {"strict_contraction", strict.pass}};
        per_h.push_back(entry);
    }
    write_csv(dir + "/p_table.csv", table);
    files.push_back("p_table.csv");

    SvgPlot plot;
    plot.title = "Dissipation probability vs window";
    plot.x_label = "h";
    plot.y_label = "p";
    SvgSeries sk{"kernel", "#1f77b4", {}, {}}, sm{"monte carlo", "#d62728", {}, {}},
        sb{"lower bound", "#2ca02c", {}, {}};
    for (const auto& row : table.rows) {
        sk.x.push_back(row[0]);
        sk.y.push_back(row[1]);
        sm.x.push_back(row[0]);
        sm.y.push_back(row[2]);
        sb.x.push_back(row[0]);
        sb.y.push_back(row[6]);
    }
    plot.series = {sk, sm, sb};
    write_svg_plot(dir + "/plot_pbound.svg", plot);
    files.push_back("plot_pbound.svg");

    json summary;
    summary["t0"] = cfg.exit_t0;
    summary["n_paths"] = cfg.exit_n_paths;
    summary["n_starts"] = cfg.exit_n_starts;
    summary["per_h"] = per_h;
    summary["girsanov"] = {{"small_ball_c", gb.small_ball_c}, {"geometric_C", gb.geometric_C}};
    return summary;
}

// ------------------------------------------------------------ excursions ---

json run_excursions(const ExperimentConfig& cfg, const RunOptions& opts, const std::string& dir,
                    std::vector<std::string>& files) {
    const Grid grid = build_grid(cfg.grid_L, cfg.grid_n_cells);
    const FluxModel model = model_from_config(cfg);
    const NoiseSpec spec = noise_from_config(cfg, grid);
    const GirsanovBound gb = make_girsanov_bound(grid);
    const int p = cfg.solver_norm_p;

    // pilots (always run: they supply the drift constants even when radii
    // are overridden)
    const int n_pilots = std::max(1, cfg.exc_pilot_seed_count);
    std::vector<PairTrajectory> pilots(static_cast<std::size_t>(n_pilots));
    parallel_for_ordered(n_pilots, opts.workers, [&](int i) {
        const std::uint64_t seed = derive_stream(cfg.seeds.front(), 0x9175, static_cast<std::uint64_t>(i));
        pilots[static_cast<std::size_t>(i)] =
            run_pair(cfg, grid, model, spec, seed, cfg.exc_pilot_t_final, 0);
    });

    CalibrationResult calib;
    if (cfg.exc_radii) {
        const auto drift = pair_drift_fit(pilots, p);
        calib.c1_hat = drift.first;
        calib.c2_hat = drift.second;
        calib.centers = *cfg.exc_radii;
        calib.centers.p = p;
        for (const auto& pilot : pilots)
            calib.pilot_excursions +=
                static_cast<int>(classify_excursions(pilot, calib.centers).rows.size());
    } else {
        calib = calibrate_centers(pilots, model, p, {cfg.exc_delta, cfg.exc_eps, 100});
    }
    const CenterSets centers = calib.centers;
    const double kappa = cfg.exc_kappa_frac * calib.c1_hat;

    const int n_seeds = static_cast<int>(cfg.seeds.size());
    struct SeedOut {
        ExcursionRecord record;
        CenterTimeRate rate;
        double b_sup = 0.0;
        double max_T = 0.0;
        bool tiling_ok = true;
    };
    std::vector<SeedOut> outs(static_cast<std::size_t>(n_seeds));
    parallel_for_ordered(n_seeds, opts.workers, [&](int s) {
        SeedOut out;
        const PairTrajectory pair = run_pair(cfg, grid, model, spec,
                                             cfg.seeds[static_cast<std::size_t>(s)],
                                             cfg.solver_t_final, 0);
        out.record = classify_excursions(pair, centers);
        double m_sup = centers.Rbar2;
        double prev_end = 0.0;
        for (const auto& row : out.record.rows) {
            m_sup = std::max(m_sup, row.m_inf_window_sup);
            out.max_T = std::max(out.max_T, row.T);
            if (std::abs(row.tau - prev_end) > 1e-9) out.tiling_ok = false;
            prev_end = row.tau_next;
        }
        out.b_sup = model.lipschitz_bound_on({-m_sup, m_sup});
        out.rate = center_time_rate(out.record, out.b_sup, cfg.solver_t_final, gb);
        outs[static_cast<std::size_t>(s)] = std::move(out);
    });

    // per-seed excursion tables + pooled eta trace
    CsvTable eta_table;
    eta_table.header = {"seed", "t", "eta_hat"};
    SvgPlot plot;
    plot.title = "Center-time rate";
    plot.x_label = "t";
    plot.y_label = "L_t / t";
    const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    json per_seed = json::array();
    std::vector<ExcursionRecord> records;
    for (int s = 0; s < n_seeds; ++s) {
        const SeedOut& out = outs[static_cast<std::size_t>(s)];
        const std::uint64_t seed = cfg.seeds[static_cast<std::size_t>(s)];
        CsvTable table;
        table.header = {"tau", "sigma", "tau_next", "tau_in", "tau_out",
                        "S", "T", "T_inf", "start_norm_pow", "m_inf_window_sup"};
        for (const auto& row : out.record.rows)
            table.rows.push_back({row.tau, row.sigma, row.tau_next, row.tau_in, row.tau_out,
                                  row.S, row.T, row.T_inf, row.start_norm_pow,
                                  row.m_inf_window_sup});
        const std::string name = "excursions_seed" + std::to_string(seed) + ".csv";
        write_csv(dir + "/" + name, table);
        files.push_back(name);

        SvgSeries series;
        series.label = "seed " + std::to_string(seed);
        series.color = palette[s % 4];
        for (const auto& [t, eta] : out.rate.eta_trace) {
            eta_table.rows.push_back({static_cast<double>(seed), t, eta});
            if (s < 4) {
                series.x.push_back(t);
                series.y.push_back(eta);
            }
        }
        if (s < 4) plot.series.push_back(series);

        json entry;
        entry["seed"] = seed;
        entry["n_excursions"] = out.record.rows.size();
        entry["truncated_tail"] = out.record.truncated_tail;
        entry["X_t"] = out.rate.X_t;
        entry["L_t"] = out.rate.L_t;
        entry["eta_hat"] = out.rate.eta_hat;
        entry["b_sup"] = out.b_sup;
        entry["max_T"] = out.max_T;
        entry["tiling_ok"] = out.tiling_ok;
        per_seed.push_back(entry);
        records.push_back(out.record);
    }
    write_csv(dir + "/eta_trace.csv", eta_table);
    files.push_back("eta_trace.csv");
    write_svg_plot(dir + "/plot_eta.svg", plot);
    files.push_back("plot_eta.svg");

    const MomentAudit audit = moment_audit(records, centers, kappa, calib.c1_hat);

    json summary;
    summary["centers"] = {{"p", centers.p},   {"R1", centers.R1},       {"R2", centers.R2},
                          {"R3", centers.R3}, {"Rbar1", centers.Rbar1}, {"Rbar2", centers.Rbar2}};
    summary["calibration"] = {{"c1_hat", calib.c1_hat},
                              {"c2_hat", calib.c2_hat},
                              {"pilot_excursions", calib.pilot_excursions},
                              {"kappa", kappa}};
    summary["per_seed"] = per_seed;
    json bins = json::array();
    for (const auto& b : audit.bins)
        bins.push_back({{"count", b.count},
                        {"mean_exp_kappa_S", b.mean_exp_kappa_S},
                        {"mean_norm_pow", b.mean_norm_pow},
                        {"ratio", b.ratio}});
    summary["moment_audit"] = {
        {"status", audit.status == MomentAudit::Status::pass          ? "pass"
                   : audit.status == MomentAudit::Status::fail        ? "fail"
                                                                      : "insufficient_data"},
        {"ratio_max_over_min", audit.ratio_max_over_min},
        {"bins", bins}};
    summary["def_c_sign_note"] = kDefCSignNote;
    return summary;
}

} // namespace

std::string resolve_output_root(const RunOptions& opts) {
    if (!opts.output_root.empty()) return opts.output_root;
    if (const char* env = std::getenv("SYNCLAW_OUTPUT_ROOT"); env != nullptr && *env != '\0')
        return env;
    return ".";
}

RunResult run(const ExperimentConfig& cfg, const RunOptions& opts) {
    validate_config(cfg);
    const std::string root = resolve_output_root(opts);
    const std::string dir = root + "/" + cfg.output_dir;
    fs::create_directories(dir);

    RunResult result;
    result.output_dir = dir;
    std::vector<std::string> files;
    const std::string cfg_hash = config_hash(cfg);
    json summary;
    try {
        if (cfg.experiment == "oracle") summary = run_oracle(cfg, opts, dir, files);
        else if (cfg.experiment == "synchro") summary = run_synchro(cfg, opts, dir, files);
        else if (cfg.experiment == "supersolution") summary = run_supersolution(cfg, opts, dir, files);
        else if (cfg.experiment == "exitprob") summary = run_exitprob(cfg, opts, dir, files);
        else if (cfg.experiment == "excursions") summary = run_excursions(cfg, opts, dir, files);
        else throw std::invalid_argument("unknown experiment " + cfg.experiment);
    } catch (const std::exception& error) {
        json failure;
        failure["error"] = error.what();
        failure["config_hash"] = cfg_hash;
        write_text(dir + "/failure.json", failure.dump(2) + "\n");
        files.push_back("failure.json");
        write_manifest(dir, cfg.experiment, cfg_hash, serialize_config(cfg), files);
        result.status = 1;
        result.manifest_path = dir + "/manifest.json";
        result.summary_json = failure.dump();
        return result;
    }
    summary["config_hash"] = cfg_hash;
    summary["schema_version"] = 1;
    summary["experiment"] = cfg.experiment;
    write_text(dir + "/summary.json", summary.dump(2) + "\n");
    files.push_back("summary.json");
    write_manifest(dir, cfg.experiment, cfg_hash, serialize_config(cfg), files);
    result.manifest_path = dir + "/manifest.json";
    result.summary_json = summary.dump();
    return result;
}

ReplayResult replay(const std::string& manifest_path, const RunOptions& opts) {
    const Manifest manifest = load_manifest(manifest_path);
    const ExperimentConfig cfg = parse_config(manifest.config_text);
    const fs::path original_dir = fs::path(manifest_path).parent_path();
    const fs::path scratch_root =
        (original_dir.empty() ? fs::path(".") : original_dir) /
        (".replay_" + manifest.config_hash);
    fs::create_directories(scratch_root);

    RunOptions scratch_opts = opts;
    scratch_opts.output_root = scratch_root.string();
    ReplayResult result;
    result.pass = true;
    try {
        const RunResult rerun = run(cfg, scratch_opts);
        if (rerun.status != 0) throw std::runtime_error("replay re-run failed");
        const fs::path regen_dir = rerun.output_dir;
        for (const auto& entry : manifest.files) {
            if (!fs::exists(regen_dir / entry.name)) {
                result.pass = false;
                result.first_mismatch_file = entry.name;
                result.detail = "file was not reproduced by the replay run";
                break;
            }
            const std::string regen_bytes = read_file((regen_dir / entry.name).string());
            const std::string regen_hash = fnv1a64_hex(regen_bytes);
            if (regen_hash == entry.hash) continue;
            result.pass = false;
            result.first_mismatch_file = entry.name;
            const fs::path original = original_dir / entry.name;
            if (fs::exists(original)) {
                const std::string orig_bytes = read_file(original.string());
                const std::size_t limit = std::min(orig_bytes.size(), regen_bytes.size());
                std::size_t offset = limit;
                for (std::size_t i = 0; i < limit; ++i) {
                    if (orig_bytes[i] != regen_bytes[i]) {
                        offset = i;
                        break;
                    }
                }
                std::ostringstream detail;
                if (offset < limit) {
                    detail << "first differing byte at offset " << offset << ": recorded '"
                           << orig_bytes[offset] << "' vs replayed '" << regen_bytes[offset] << "'";
                } else {
                    detail << "size mismatch: recorded " << orig_bytes.size() << " bytes vs replayed "
                           << regen_bytes.size();
                }
                result.detail = detail.str();
            } else {
                result.detail = "hash mismatch: recorded " + entry.hash + " vs replayed " + regen_hash;
            }
            break;
        }
    } catch (...) {
        fs::remove_all(scratch_root);
        throw;
    }
    fs::remove_all(scratch_root);
    return result;
}

} // namespace synclaw
