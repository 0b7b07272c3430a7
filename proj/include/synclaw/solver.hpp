// IMEX time integration of the conservation law: explicit monotone local
// Lax-Friedrichs flux, implicit Dirichlet diffusion. Also the explicit
// super-/sub-solution envelopes and the Lp drift audit.
#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "synclaw/flux.hpp"
#include "synclaw/grid.hpp"
#include "synclaw/noise.hpp"

namespace synclaw {

struct SolverConfig {
    double dt = 1e-3;
    double t_final = 1.0;
    double cfl_safety = 0.9;                 // in (0, 1]
    std::optional<Interval> clip_range;      // extra range for flux-Lipschitz evaluation
    int norm_p = 4;                          // even integer for the Lp series
    int state_stride = 0;                    // 0 = keep no intermediate states
};

struct SolverError : std::runtime_error {
    int step_index;
    SolverError(const std::string& what, int step) : std::runtime_error(what), step_index(step) {}
};

/// Single IMEX step with a caller-supplied LLF speed lambda >= sup |A'| over
/// the state range. The advective ghost state is the boundary value 0.
/// Requires 2 * lambda * dt <= dx (monotonicity); callers enforce CFL.
Field imex_step(const Field& u, const FluxModel& model, const Field& forcing_increment,
                double dt, double lambda);

/// Spec-facing step: derives lambda from the running state range (plus
/// clip_range if given) and rejects CFL violations with a shrink-dt signal.
Field step(const Field& u, const FluxModel& model, const Field& forcing_increment,
           double dt, const SolverConfig& cfg, int step_index = 0);

/// Per-step boundary bookkeeping of the advective numerical flux:
/// returns F_hat(left face) - F_hat(right face), so that
/// d(mass)/step = dt * (this + boundary_normal_gradient(u_new)) + mass(forcing).
double advective_boundary_budget(const Field& u, const FluxModel& model, double lambda);

double llf_speed(const FluxModel& model, const Field& u, const std::optional<Interval>& clip);

struct Trajectory {
    std::vector<double> times;
    std::vector<double> norm_l1, norm_l2, norm_lp, norm_linf;
    std::vector<double> boundary_flux;  // diffusive normal-gradient rate per step (aligned with times[1:])
    int norm_p = 4;
    std::vector<int> state_steps;
    std::vector<Field> states;          // snapshots at state_stride (always includes first and last)
    double dt = 0.0;

    const Field& final_state() const { return states.back(); }
    /// State stored at the step closest below the given time (snapshots only).
    const Field& state_at_or_before(double t) const;
};

/// Integrates over [0, t_final] on the forcing grid (dt per outer step),
/// injecting psi0*dt + sum_k psi_k dB_k each step. noise/path may be null
/// for unforced runs. Sub-steps automatically under CFL pressure when the
/// path carries no Brownian modes; otherwise a violation aborts.
Trajectory evolve(const Field& u0, const FluxModel& model, const NoiseSpec* noise,
                  const NoisePath* path, const SolverConfig& cfg,
                  const std::function<void(int, double, const Field&)>& observer = {});

// --- super-solution envelope (coercive regime) ------------------------------

struct SuperSolutionParams {
    double a = 0.0;
    double b = 0.0;
    double horizon = 0.0;      // T
    double alpha = 0.0, beta = 0.0;
    double domain_span = 0.0;  // D
    double z_sup = 0.0;        // ||z||_{inf,T}
    double z_grad_sum = 0.0;   // sum_i ||d_i z||_{inf,T}
    double domain_length = 0.0;

    double phi_plus(double t, double x) const { return (a + b * x) / t; }
    double phi_minus(double t, double x) const { return -(a + b * (domain_length - x)) / t; }
};

/// b = max(1, 2(1 + 2D + T z_sup + T beta/alpha)/(alpha d), 2 z_grad_sum),
/// a = b (1 + D + T z_sup + T beta/alpha), with d = 1.
SuperSolutionParams supersolution_params(const FluxModel& model, double t_final,
                                         const ZStats& z, const Grid& grid);

struct ComparisonReport {
    bool pass = true;
    double worst_violation = 0.0;  // max over checked points of u - phi+ (or phi- - u)
    double t_worst = 0.0;
    int cell_worst = 0;
    int side_worst = 0;            // +1 upper envelope, -1 lower
};

/// Checks phi- - tol <= u <= phi+ + tol on every stored state with t >= t_min.
ComparisonReport verify_comparison(const Trajectory& traj, const SuperSolutionParams& params,
                                   double t_min, double tol);

// --- Lp drift audit ----------------------------------------------------------

struct DriftFit {
    enum class Status { ok, degenerate };
    Status status = Status::ok;
    double c1 = 0.0;              // drift rate, positive when mean-reverting
    double c2 = 0.0;              // drift constant
    double inlier_fraction = 0.0; // steps whose increment sits below the fitted drift + 3 sigma
};

/// Regresses per-step increments of y = ||u||_p^p on -y + const:
/// (y_{k+1} - y_k)/dt ~ -c1 y_k + c2. p must be an even integer >= 2.
DriftFit fit_lp_drift(const std::vector<double>& times, const std::vector<double>& lp_pow_series, int p);

/// Convenience overload on a trajectory's recorded Lp series.
DriftFit lp_drift_audit(const Trajectory& traj, int p);

} // namespace synclaw
