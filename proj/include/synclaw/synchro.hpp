// Coupled two-solution experiments: shared-noise evolution of (u, v), the
// L1 series of the difference, contraction-rate fits, and the mass loss of
// the linearized difference kernel.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "synclaw/flux.hpp"
#include "synclaw/grid.hpp"
#include "synclaw/noise.hpp"
#include "synclaw/solver.hpp"

namespace synclaw {

struct PairTrajectory {
    std::vector<double> times;
    std::vector<double> w_l1;            // ||u_t - v_t||_1
    std::vector<double> boundary_diss;   // total boundary dissipation rate of w per step (aligned with times[1:])
    std::vector<double> sup_norms;       // max(||u||_inf, ||v||_inf)
    std::vector<double> u_lp_pow, v_lp_pow;  // ||.||_p^p series for the configured even p
    std::vector<double> u_linf, v_linf;
    int norm_p = 4;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::string config_hash;

    // full states at state_stride (first and last always kept)
    std::vector<int> state_steps;
    std::vector<Field> u_states, v_states;

    const Grid& grid() const { return *u_states.front().grid; }
    /// Pair norm (||u||_p^p + ||v||_p^p)^(1/p) at step k.
    double pair_lp(std::size_t k) const;
    /// Index of the last stored snapshot with step time <= t.
    std::size_t snapshot_at_or_before(double t) const;
};

/// Advances u and v with identical forcing increments and a shared LLF speed
/// so the difference evolves by an exactly linear monotone scheme.
PairTrajectory couple_evolve(const Field& u0, const Field& v0, const FluxModel& model,
                             const NoiseSpec* noise, const NoisePath* path,
                             const SolverConfig& cfg, std::uint64_t seed = 0);

struct LyapunovFit {
    enum class Status { ok, synchronised_below_resolution };
    Status status = Status::ok;
    double lambda_hat = 0.0;
    double stderr_slope = 0.0;
    double t_hit = 0.0;  // set on the below-resolution branch
    int n_points = 0;
};

/// Least-squares slope of log ||w||_1 against t on [t_burn, T].
LyapunovFit estimate_lyapunov(const PairTrajectory& pair, double t_burn);

/// Linearized difference evolution with coefficients frozen from the stored
/// pair states (face-averaged secant slopes, upwind flux, implicit
/// diffusion), advanced from t0 to t1 on the pair's own step grid.
Field linearized_evolve(const PairTrajectory& pair, const FluxModel& model,
                        const Field& w0, double t0, double t1);

struct KernelMassLoss {
    double p_hat = 0.0;          // 1 - max over source cells of final column mass
    int argmax_cell = 0;         // source cell attaining the max mass (least dissipation)
    double max_column_mass = 0.0;
    double min_column_mass = 0.0;
};

/// Evolves a delta column from every source cell over [t, t+h] and reports
/// the smallest mass loss. Columns are checked nonnegative with mass <= 1.
KernelMassLoss kernel_mass_loss(const PairTrajectory& pair, const FluxModel& model,
                                double t, double h, int workers = 1);

struct ContractionAudit {
    bool pass = false;
    double lhs = 0.0;   // ||w_{t+h}||_1
    double rhs = 0.0;   // (1 - p_hat + tol) ||w_t||_1
    double tol = 0.0;
};

/// Checks ||w_{t+h}||_1 <= (1 - p_hat + tol) ||w_t||_1 with
/// tol = 1e-6 + 10 dx. Requires p_hat in [0, 1].
ContractionAudit strict_contraction_audit(const PairTrajectory& pair, double t, double h,
                                          double p_hat);

struct PathwiseBoundStats {
    std::vector<std::uint64_t> seeds;
    std::vector<double> c_hat_per_seed;      // sup over u0 set and s in [1,2] of ||u_s||_inf
    std::vector<double> c_hat_per_magnitude; // max over seeds, one entry per probed ||u0||_inf
    std::vector<double> magnitudes;
    double c_hat = 0.0;
    double c_B_hat = 0.0;                    // sup |B| over the ball of radius c_hat
    double rel_spread_across_magnitudes = 0.0;
    double abs_spread_across_magnitudes = 0.0;
};

/// Runs the solver from randomized initial conditions of the given sup-norm
/// magnitudes and records the [1, 2] window suprema (coercive regime).
PathwiseBoundStats pathwise_bound_stats(const FluxModel& model, const Grid& grid,
                                        const NoiseSpec* noise, const SolverConfig& cfg,
                                        const std::vector<std::uint64_t>& seeds,
                                        const std::vector<double>& magnitudes,
                                        int u0_per_magnitude, int workers = 1);

/// Randomized initial condition with the requested sup norm: a low-mode
/// Fourier sine mix, deterministic in the seed.
Field random_initial_condition(const Grid& grid, double sup_norm, std::uint64_t seed);

} // namespace synclaw
