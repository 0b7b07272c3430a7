#include "synclaw/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace synclaw {

namespace {

Interval running_range(const Field& u) {
    double lo = 0.0, hi = 0.0;  // ghost state 0 participates
    for (double v : u.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

Interval hull(Interval a, const std::optional<Interval>& b) {
    if (!b) return a;
    return {std::min(a.lo, b->lo), std::max(a.hi, b->hi)};
}

// Local Lax-Friedrichs numerical flux.
inline double llf_flux(const FluxModel& m, double ul, double ur, double lambda) {
    return 0.5 * (m.flux(ul) + m.flux(ur)) - 0.5 * lambda * (ur - ul);
}

std::vector<double> face_fluxes(const Field& u, const FluxModel& model, double lambda) {
    const int n = u.size();
    std::vector<double> faces(static_cast<std::size_t>(n) + 1);
    faces[0] = llf_flux(model, 0.0, u[0], lambda);
    for (int i = 1; i < n; ++i)
        faces[static_cast<std::size_t>(i)] = llf_flux(model, u[i - 1], u[i], lambda);
    faces[static_cast<std::size_t>(n)] = llf_flux(model, u[n - 1], 0.0, lambda);
    return faces;
}

} // namespace

double llf_speed(const FluxModel& model, const Field& u, const std::optional<Interval>& clip) {
    Interval range = hull(running_range(u), clip);
    // pad so the speed also dominates mid-step states
    const double pad = 1e-3 * (1.0 + std::max(std::abs(range.lo), std::abs(range.hi)));
    return model.lipschitz_bound_on({range.lo - pad, range.hi + pad});
}

Field imex_step(const Field& u, const FluxModel& model, const Field& forcing_increment,
                double dt, double lambda) {
    const Grid& g = *u.grid;
    const auto faces = face_fluxes(u, model, lambda);
    const Field div = divergence_of_face_flux(faces, g);
    Field star = make_field(g);
    for (int i = 0; i < g.n_cells; ++i)
        star[i] = u[i] - dt * div[i] + forcing_increment[i];
    return implicit_diffusion_step(star, dt);
}

double advective_boundary_budget(const Field& u, const FluxModel& model, double lambda) {
    const int n = u.size();
    return llf_flux(model, 0.0, u[0], lambda) - llf_flux(model, u[n - 1], 0.0, lambda);
}

Field step(const Field& u, const FluxModel& model, const Field& forcing_increment,
           double dt, const SolverConfig& cfg, int step_index) {
    if (!all_finite(u))
        throw SolverError("step: non-finite state at step " + std::to_string(step_index), step_index);
    const double lambda = llf_speed(model, u, cfg.clip_range);
    if (lambda > 0.0 && dt > cfg.cfl_safety * u.grid->dx / (2.0 * lambda))
        throw SolverError("step: CFL violation, shrink dt below " +
                          std::to_string(cfg.cfl_safety * u.grid->dx / (2.0 * lambda)) +
                          " at step " + std::to_string(step_index), step_index);
    Field out = imex_step(u, model, forcing_increment, dt, lambda);
    if (!all_finite(out))
        throw SolverError("step: NaN detected at step " + std::to_string(step_index), step_index);
    return out;
}

const Field& Trajectory::state_at_or_before(double t) const {
    if (states.empty()) throw std::runtime_error("trajectory holds no states");
    std::size_t best = 0;
    for (std::size_t i = 0; i < state_steps.size(); ++i) {
        const double ts = state_steps[i] * dt;
        if (ts <= t + 1e-12) best = i;
    }
    return states[best];
}

Trajectory evolve(const Field& u0, const FluxModel& model, const NoiseSpec* noise,
                  const NoisePath* path, const SolverConfig& cfg,
                  const std::function<void(int, double, const Field&)>& observer) {
    if (!all_finite(u0)) throw std::invalid_argument("evolve: non-finite initial state");
    const Grid& g = *u0.grid;
    const int n_steps = static_cast<int>(std::llround(cfg.t_final / cfg.dt));
    if (std::abs(n_steps * cfg.dt - cfg.t_final) > 1e-9 * std::max(1.0, cfg.t_final))
        throw std::invalid_argument("evolve: t_final must be a multiple of dt");
    const bool has_brownian = path != nullptr && path->n_modes > 0;
    if (path != nullptr) {
        if (std::abs(path->dt - cfg.dt) > 1e-12)
            throw std::invalid_argument("evolve: path dt does not match solver dt");
        if (path->n_steps < n_steps)
            throw std::invalid_argument("evolve: path shorter than the horizon");
    }

    Trajectory traj;
    traj.norm_p = cfg.norm_p;
    traj.dt = cfg.dt;
    Field u = u0;
    auto record_norms = [&](double t) {
        traj.times.push_back(t);
        traj.norm_l1.push_back(lp_norm(u, 1.0));
        traj.norm_l2.push_back(lp_norm(u, 2.0));
        traj.norm_lp.push_back(lp_norm(u, cfg.norm_p));
        traj.norm_linf.push_back(lp_norm(u, kPInf));
    };
    auto snapshot = [&](int step) {
        traj.state_steps.push_back(step);
        traj.states.push_back(u);
    };
    record_norms(0.0);
    snapshot(0);
    if (observer) observer(0, 0.0, u);

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
                forcing[i] += add;
            }
        }

        const double lambda = llf_speed(model, u, cfg.clip_range);
        const double dt_max = lambda > 0.0 ? cfg.cfl_safety * g.dx / (2.0 * lambda) : kPInf;
        if (cfg.dt <= dt_max) {
            u = imex_step(u, model, forcing, cfg.dt, lambda);
        } else if (has_brownian) {
            throw SolverError("evolve: CFL violation with Brownian forcing; shrink dt below " +
                              std::to_string(dt_max) + " at step " + std::to_string(j), j);
        } else {
            // Deterministic forcing re-grids exactly: split the step.
            int k_sub = static_cast<int>(std::ceil(cfg.dt / dt_max));
            for (int s = 0; s < k_sub;) {
                const double dt_sub = cfg.dt / k_sub;
                const double lam = llf_speed(model, u, cfg.clip_range);
                if (lam > 0.0 && dt_sub > cfg.cfl_safety * g.dx / (2.0 * lam)) {
                    k_sub *= 2;  // restart the split with a finer ladder
                    s = 0;
                    continue;
                }
                Field sub_forcing = make_field(g);
                if (noise != nullptr) {
                    const Field p0 = noise->psi0_field(t + s * dt_sub);
                    for (int i = 0; i < g.n_cells; ++i) sub_forcing[i] = dt_sub * p0[i];
                }
                u = imex_step(u, model, sub_forcing, dt_sub, lam);
                ++s;
                if (k_sub > (1 << 24))
                    throw SolverError("evolve: CFL split exploded at step " + std::to_string(j), j);
            }
        }
        if (!all_finite(u))
            throw SolverError("evolve: NaN detected at step " + std::to_string(j), j);

        record_norms((j + 1) * cfg.dt);
        traj.boundary_flux.push_back(boundary_normal_gradient(u));
        const bool keep = (cfg.state_stride > 0 && (j + 1) % cfg.state_stride == 0) || j + 1 == n_steps;
        if (keep) snapshot(j + 1);
        if (observer) observer(j + 1, (j + 1) * cfg.dt, u);
    }
    return traj;
}

SuperSolutionParams supersolution_params(const FluxModel& model, double t_final,
                                         const ZStats& z, const Grid& grid) {
    if (!model.coercivity())
        throw std::invalid_argument("supersolution_params: model lacks coercivity parameters");
    const auto [alpha, beta] = *model.coercivity();
    SuperSolutionParams p;
    p.horizon = t_final;
    p.alpha = alpha;
    p.beta = beta;
    p.domain_span = grid.domain_span();
    p.z_sup = z.z_sup;
    p.z_grad_sum = z.z_grad_sum;
    p.domain_length = grid.length;
    const double load = 1.0 + 2.0 * p.domain_span + t_final * z.z_sup + t_final * beta / alpha;
    p.b = std::max({1.0, 2.0 * load / alpha, 2.0 * z.z_grad_sum});
    p.a = p.b * (1.0 + p.domain_span + t_final * z.z_sup + t_final * beta / alpha);
    return p;
}

ComparisonReport verify_comparison(const Trajectory& traj, const SuperSolutionParams& params,
                                   double t_min, double tol) {
    if (!(t_min > 0.0)) throw std::invalid_argument("verify_comparison: t_min must be positive");
    ComparisonReport report;
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
        const double t = traj.state_steps[s] * traj.dt;
        if (t < t_min - 1e-12 || t == 0.0) continue;
        const Field& u = traj.states[s];
        const Grid& g = *u.grid;
        for (int i = 0; i < g.n_cells; ++i) {
            const double x = g.centers[static_cast<std::size_t>(i)];
            const double upper = u[i] - params.phi_plus(t, x);
            const double lower = params.phi_minus(t, x) - u[i];
            if (upper > report.worst_violation) {
                report.worst_violation = upper;
                report.t_worst = t;
                report.cell_worst = i;
                report.side_worst = +1;
            }
            if (lower > report.worst_violation) {
                report.worst_violation = lower;
                report.t_worst = t;
                report.cell_worst = i;
                report.side_worst = -1;
            }
        }
    }
    report.pass = report.worst_violation <= tol;
    return report;
}

DriftFit fit_lp_drift(const std::vector<double>& times, const std::vector<double>& y, int p) {
    if (p < 2 || p % 2 != 0)
        throw std::invalid_argument("fit_lp_drift: p must be an even integer >= 2");
    if (y.size() < 3 || times.size() != y.size())
        throw std::invalid_argument("fit_lp_drift: need at least 3 aligned samples");
    const std::size_t m = y.size() - 1;
    // response r_k = (y_{k+1} - y_k) / dt_k against predictor y_k
    double sum_x = 0.0, sum_r = 0.0, sum_xx = 0.0, sum_xr = 0.0;
    std::vector<double> xs(m), rs(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double dt = times[k + 1] - times[k];
        xs[k] = y[k];
        rs[k] = (y[k + 1] - y[k]) / dt;
        sum_x += xs[k];
        sum_r += rs[k];
        sum_xx += xs[k] * xs[k];
        sum_xr += xs[k] * rs[k];
    }
    DriftFit fit;
    const double denom = m * sum_xx - sum_x * sum_x;
    const double scale = std::max(1.0, sum_xx / m);
    if (std::abs(denom) <= 1e-14 * m * m * scale) {
        fit.status = DriftFit::Status::degenerate;
        fit.c1 = 0.0;
        fit.c2 = sum_r / m;
        fit.inlier_fraction = 1.0;
        return fit;
    }
    const double slope = (m * sum_xr - sum_x * sum_r) / denom;
    const double intercept = (sum_r - slope * sum_x) / m;
    fit.c1 = -slope;
    fit.c2 = intercept;
    double ss = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double resid = rs[k] - (slope * xs[k] + intercept);
        ss += resid * resid;
    }
    const double sigma = std::sqrt(ss / m);
    int inliers = 0;
    for (std::size_t k = 0; k < m; ++k)
        if (rs[k] <= slope * xs[k] + intercept + 3.0 * sigma) ++inliers;
    fit.inlier_fraction = static_cast<double>(inliers) / static_cast<double>(m);
    return fit;
}

DriftFit lp_drift_audit(const Trajectory& traj, int p) {
    if (p != traj.norm_p)
        throw std::invalid_argument("lp_drift_audit: trajectory recorded a different p");
    std::vector<double> y(traj.norm_lp.size());
    for (std::size_t k = 0; k < y.size(); ++k) y[k] = std::pow(traj.norm_lp[k], p);
    return fit_lp_drift(traj.times, y, p);
}

} // namespace synclaw
