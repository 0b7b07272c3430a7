#include "synclaw/synchro.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "synclaw/parallel.hpp"
#include "synclaw/rng.hpp"

namespace synclaw {

namespace {

double llf_flux_value(const FluxModel& m, double ul, double ur, double lambda) {
    return 0.5 * (m.flux(ul) + m.flux(ur)) - 0.5 * lambda * (ur - ul);
}

} // namespace

double PairTrajectory::pair_lp(std::size_t k) const {
    return std::pow(u_lp_pow[k] + v_lp_pow[k], 1.0 / norm_p);
}

std::size_t PairTrajectory::snapshot_at_or_before(double t) const {
    std::size_t best = 0;
    for (std::size_t i = 0; i < state_steps.size(); ++i)
        if (state_steps[i] * dt <= t + 1e-12) best = i;
    return best;
}

PairTrajectory couple_evolve(const Field& u0, const Field& v0, const FluxModel& model,
                             const NoiseSpec* noise, const NoisePath* path,
                             const SolverConfig& cfg, std::uint64_t seed) {
    if (u0.grid != v0.grid)
        throw std::invalid_argument("couple_evolve: states live on different grids");
    const Grid& g = *u0.grid;
    const int n_steps = static_cast<int>(std::llround(cfg.t_final / cfg.dt));
    if (path != nullptr && path->n_steps < n_steps)
        throw std::invalid_argument("couple_evolve: path shorter than the horizon");

    PairTrajectory pair;
    pair.norm_p = cfg.norm_p;
    pair.dt = cfg.dt;
    pair.seed = seed;

    Field u = u0, v = v0;
    auto record = [&](double t) {
        pair.times.push_back(t);
        Field w = make_field(g);
        for (int i = 0; i < g.n_cells; ++i) w[i] = u[i] - v[i];
        pair.w_l1.push_back(lp_norm(w, 1.0));
        pair.sup_norms.push_back(std::max(lp_norm(u, kPInf), lp_norm(v, kPInf)));
        pair.u_lp_pow.push_back(std::pow(lp_norm(u, cfg.norm_p), cfg.norm_p));
        pair.v_lp_pow.push_back(std::pow(lp_norm(v, cfg.norm_p), cfg.norm_p));
        pair.u_linf.push_back(lp_norm(u, kPInf));
        pair.v_linf.push_back(lp_norm(v, kPInf));
    };
    auto snapshot = [&](int step) {
        pair.state_steps.push_back(step);
        pair.u_states.push_back(u);
        pair.v_states.push_back(v);
    };
    record(0.0);
    snapshot(0);

    for (int j = 0; j < n_steps; ++j) {
        const double t = j * cfg.dt;
        Field forcing = make_field(g);
        if (noise != nullptr) {
            const Field p0 = noise->psi0_field(t);
            for (int i = 0; i < g.n_cells; ++i) {
                double add = cfg.dt * p0[i];
                if (path != nullptr)
                    for (int k = 0; k < path->n_modes; ++k)
                        add += noise->modes[static_cast<std::size_t>(k)][i] * path->increment(j, k);
                forcing[i] = add;
            }
        }
        // shared LLF speed keeps the difference scheme linear and monotone
        const double lambda = std::max(llf_speed(model, u, cfg.clip_range),
                                       llf_speed(model, v, cfg.clip_range));
        if (lambda > 0.0 && cfg.dt > cfg.cfl_safety * g.dx / (2.0 * lambda))
            throw SolverError("couple_evolve: CFL violation; shrink dt below " +
                              std::to_string(cfg.cfl_safety * g.dx / (2.0 * lambda)) +
                              " at step " + std::to_string(j), j);

        // boundary bookkeeping of the difference before stepping
        const int n = g.n_cells;
        const double adv_budget =
            (llf_flux_value(model, 0.0, u[0], lambda) - llf_flux_value(model, 0.0, v[0], lambda)) -
            (llf_flux_value(model, u[n - 1], 0.0, lambda) - llf_flux_value(model, v[n - 1], 0.0, lambda));

        u = imex_step(u, model, forcing, cfg.dt, lambda);
        v = imex_step(v, model, forcing, cfg.dt, lambda);
        if (!all_finite(u) || !all_finite(v))
            throw SolverError("couple_evolve: NaN detected at step " + std::to_string(j), j);

        Field w = make_field(g);
        for (int i = 0; i < n; ++i) w[i] = u[i] - v[i];
        pair.boundary_diss.push_back(adv_budget + boundary_normal_gradient(w));

        record((j + 1) * cfg.dt);
        const bool keep = (cfg.state_stride > 0 && (j + 1) % cfg.state_stride == 0) || j + 1 == n_steps;
        if (keep) snapshot(j + 1);
    }
    return pair;
}

LyapunovFit estimate_lyapunov(const PairTrajectory& pair, double t_burn) {
    LyapunovFit fit;
    const double floor_abs = 1e-306;
    for (std::size_t k = 0; k < pair.times.size(); ++k) {
        if (pair.w_l1[k] <= floor_abs) {
            fit.status = LyapunovFit::Status::synchronised_below_resolution;
            fit.t_hit = pair.times[k];
            return fit;
        }
    }
    double sum_t = 0.0, sum_y = 0.0, sum_tt = 0.0, sum_ty = 0.0;
    int m = 0;
    std::vector<double> ts, ys;
    for (std::size_t k = 0; k < pair.times.size(); ++k) {
        if (pair.times[k] < t_burn - 1e-12) continue;
        const double yy = std::log(pair.w_l1[k]);
        ts.push_back(pair.times[k]);
        ys.push_back(yy);
        sum_t += pair.times[k];
        sum_y += yy;
        sum_tt += pair.times[k] * pair.times[k];
        sum_ty += pair.times[k] * yy;
        ++m;
    }
    if (m < 3) throw std::invalid_argument("estimate_lyapunov: fit window has fewer than 3 points");
    const double denom = m * sum_tt - sum_t * sum_t;
    fit.lambda_hat = (m * sum_ty - sum_t * sum_y) / denom;
    const double intercept = (sum_y - fit.lambda_hat * sum_t) / m;
    double ss = 0.0;
    for (int k = 0; k < m; ++k) {
        const double r = ys[static_cast<std::size_t>(k)] -
                         (fit.lambda_hat * ts[static_cast<std::size_t>(k)] + intercept);
        ss += r * r;
    }
    const double sigma2 = ss / std::max(1, m - 2);
    fit.stderr_slope = std::sqrt(sigma2 * m / denom);
    fit.n_points = m;
    return fit;
}

Field linearized_evolve(const PairTrajectory& pair, const FluxModel& model,
                        const Field& w0, double t0, double t1) {
    if (pair.state_steps.empty())
        throw std::invalid_argument("linearized_evolve: pair run stored no states");
    if (!(t1 > t0)) throw std::invalid_argument("linearized_evolve: need t1 > t0");
    const Grid& g = pair.grid();
    const int n = g.n_cells;
    const double dt = pair.dt;
    const int step0 = static_cast<int>(std::llround(t0 / dt));
    const int step1 = static_cast<int>(std::llround(t1 / dt));
    if (step1 * dt > pair.times.back() + 1e-12)
        throw std::invalid_argument("linearized_evolve: window beyond the stored horizon");

    Field w = w0;
    std::vector<double> coeff(static_cast<std::size_t>(n));
    for (int j = step0; j < step1; ++j) {
        // frozen coefficients from the last stored snapshot at or before t_j
        const std::size_t s = pair.snapshot_at_or_before(j * dt);
        const Field& us = pair.u_states[s];
        const Field& vs = pair.v_states[s];
        double c_max = 0.0;
        for (int i = 0; i < n; ++i) {
            coeff[static_cast<std::size_t>(i)] = secant_slope(model, us[i], vs[i]);
            c_max = std::max(c_max, std::abs(coeff[static_cast<std::size_t>(i)]));
        }
        if (c_max * dt > g.dx)
            throw std::runtime_error("linearized_evolve: CFL violated for the frozen field");

        // upwind face fluxes with face-averaged coefficients; zero inflow
        Field star = make_field(g);
        auto face_flux = [&](int face) {
            double c, wl, wr;
            if (face == 0) {
                c = coeff[0];
                wl = 0.0;
                wr = w[0];
            } else if (face == n) {
                c = coeff[static_cast<std::size_t>(n - 1)];
                wl = w[n - 1];
                wr = 0.0;
            } else {
                c = 0.5 * (coeff[static_cast<std::size_t>(face - 1)] + coeff[static_cast<std::size_t>(face)]);
                wl = w[face - 1];
                wr = w[face];
            }
            return c >= 0.0 ? c * wl : c * wr;
        };
        double left = face_flux(0);
        for (int i = 0; i < n; ++i) {
            const double right = face_flux(i + 1);
            star[i] = w[i] - dt * (right - left) / g.dx;
            left = right;
        }
        w = implicit_diffusion_step(star, dt);
    }
    return w;
}

KernelMassLoss kernel_mass_loss(const PairTrajectory& pair, const FluxModel& model,
                                double t, double h, int workers) {
    if (!(h > 0.0)) throw std::invalid_argument("kernel_mass_loss: h must be positive");
    const Grid& g = pair.grid();
    const int n = g.n_cells;
    std::vector<double> masses(static_cast<std::size_t>(n));
    parallel_for_ordered(n, workers, [&](int j) {
        Field delta = make_field(g);
        delta[j] = 1.0 / g.dx;
        const Field column = linearized_evolve(pair, model, delta, t, t + h);
        double mass = 0.0;
        for (int i = 0; i < n; ++i) {
            if (column[i] < -1e-10)
                throw std::runtime_error("kernel_mass_loss: column " + std::to_string(j) +
                                         " went negative at cell " + std::to_string(i) +
                                         ": " + std::to_string(column[i]));
            mass += column[i];
        }
        mass *= g.dx;
        if (mass > 1.0 + 1e-10)
            throw std::runtime_error("kernel_mass_loss: column " + std::to_string(j) +
                                     " mass exceeds 1: " + std::to_string(mass));
        masses[static_cast<std::size_t>(j)] = mass;
    });
    KernelMassLoss out;
    out.max_column_mass = 0.0;
    out.min_column_mass = kPInf;
    for (int j = 0; j < n; ++j) {
        const double m = masses[static_cast<std::size_t>(j)];
        if (m > out.max_column_mass) {
            out.max_column_mass = m;
            out.argmax_cell = j;
        }
        out.min_column_mass = std::min(out.min_column_mass, m);
    }
    out.p_hat = 1.0 - out.max_column_mass;
    return out;
}

ContractionAudit strict_contraction_audit(const PairTrajectory& pair, double t, double h,
                                          double p_hat) {
    if (!(p_hat >= 0.0 && p_hat <= 1.0))
        throw std::invalid_argument("strict_contraction_audit: p_hat must lie in [0, 1]");
    const double dx = pair.grid().dx;
    auto series_at = [&](double tt) {
        const auto k = static_cast<std::size_t>(std::llround(tt / pair.dt));
        if (k >= pair.w_l1.size())
            throw std::invalid_argument("strict_contraction_audit: time beyond the run");
        return pair.w_l1[k];
    };
    ContractionAudit audit;
    audit.tol = 1e-6 + 10.0 * dx;
    audit.lhs = series_at(t + h);
    audit.rhs = (1.0 - p_hat + audit.tol) * series_at(t);
    audit.pass = audit.lhs <= audit.rhs;
    return audit;
}

Field random_initial_condition(const Grid& grid, double sup_norm, std::uint64_t seed) {
    GaussianStream stream(derive_stream(seed, 0x1c0de));
    const int n_modes = 6;
    std::vector<double> amps(n_modes);
    for (auto& a : amps) a = stream.next();
    Field f = sample_field(grid, [&](double x) {
        double acc = 0.0;
        for (int k = 1; k <= n_modes; ++k)
            acc += amps[static_cast<std::size_t>(k - 1)] *
                   std::sin(k * 3.14159265358979323846 * x / grid.length);
        return acc;
    });
    const double m = lp_norm(f, kPInf);
    if (m > 0.0)
        for (auto& v : f.values) v *= sup_norm / m;
    return f;
}

PathwiseBoundStats pathwise_bound_stats(const FluxModel& model, const Grid& grid,
                                        const NoiseSpec* noise, const SolverConfig& cfg,
                                        const std::vector<std::uint64_t>& seeds,
                                        const std::vector<double>& magnitudes,
                                        int u0_per_magnitude, int workers) {
    if (!model.coercivity())
        throw std::invalid_argument("pathwise_bound_stats: coercive model required");
    if (cfg.t_final < 2.0)
        throw std::invalid_argument("pathwise_bound_stats: horizon must reach t = 2");
    PathwiseBoundStats stats;
    stats.seeds = seeds;
    stats.magnitudes = magnitudes;
    stats.c_hat_per_magnitude.assign(magnitudes.size(), 0.0);
    stats.c_hat_per_seed.assign(seeds.size(), 0.0);

    struct Task { std::size_t seed_idx, mag_idx; int rep; };
    std::vector<Task> tasks;
    for (std::size_t s = 0; s < seeds.size(); ++s)
        for (std::size_t m = 0; m < magnitudes.size(); ++m)
            for (int r = 0; r < u0_per_magnitude; ++r) tasks.push_back({s, m, r});
    std::vector<double> window_sup(tasks.size(), 0.0);

    parallel_for_ordered(static_cast<int>(tasks.size()), workers, [&](int idx) {
        const Task& task = tasks[static_cast<std::size_t>(idx)];
        // same shape family across magnitudes so the probe isolates the
        // dependence on the initial magnitude
        const Field u0 = random_initial_condition(
            grid, magnitudes[task.mag_idx],
            derive_stream(seeds[task.seed_idx], 0xabcd, static_cast<std::uint64_t>(task.rep)));
        NoisePath path;
        const NoisePath* path_ptr = nullptr;
        if (noise != nullptr && noise->n_modes() > 0) {
            path = sample_path(*noise, seeds[task.seed_idx], cfg.dt,
                               static_cast<int>(std::llround(cfg.t_final / cfg.dt)));
            path_ptr = &path;
        }
        double sup = 0.0;
        evolve(u0, model, noise, path_ptr, cfg,
               [&](int, double t, const Field& u) {
                   if (t >= 1.0 - 1e-12 && t <= 2.0 + 1e-12)
                       sup = std::max(sup, lp_norm(u, kPInf));
               });
        window_sup[static_cast<std::size_t>(idx)] = sup;
    });

    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const Task& task = tasks[i];
        stats.c_hat_per_seed[task.seed_idx] = std::max(stats.c_hat_per_seed[task.seed_idx], window_sup[i]);
        stats.c_hat_per_magnitude[task.mag_idx] = std::max(stats.c_hat_per_magnitude[task.mag_idx], window_sup[i]);
        stats.c_hat = std::max(stats.c_hat, window_sup[i]);
    }
    stats.c_B_hat = model.lipschitz_bound_on({-stats.c_hat, stats.c_hat});
    double lo = kPInf, hi = 0.0;
    for (double c : stats.c_hat_per_magnitude) {
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    stats.rel_spread_across_magnitudes = lo > 0.0 ? (hi - lo) / lo : 0.0;
    stats.abs_spread_across_magnitudes = hi - lo;
    return stats;
}

} // namespace synclaw
