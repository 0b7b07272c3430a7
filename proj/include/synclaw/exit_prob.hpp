// Monte Carlo estimation of the boundary-exit probability of the
// characteristic diffusion dX = B(u, v)(X) ds + sqrt(2) dW, and the
// closed-form change-of-measure lower bound.
#pragma once

#include <cstdint>
#include <vector>

#include "synclaw/flux.hpp"
#include "synclaw/grid.hpp"
#include "synclaw/synchro.hpp"

namespace synclaw {

struct GirsanovBound {
    double small_ball_c = 0.0;  // erf(1/sqrt(2))^2 in 1D
    double geometric_C = 0.0;   // L + 1 (smallest shift clearing the fattened interval)

    /// c * exp(-(C + B_sup^2)/h); requires h in (0, 1].
    double value(double h, double B_sup) const;
};

GirsanovBound make_girsanov_bound(const Grid& grid);

/// Convenience: make_girsanov_bound(grid).value(h, B_sup).
double girsanov_bound_value(const Grid& grid, double h, double B_sup);

/// Euler-Maruyama exit fraction over [t, t+h] started at y0, drift
/// interpolated linearly in space and piecewise-constant in time from the
/// stored pair states. Paths are absorbed on leaving (0, L).
double simulate_exit(const PairTrajectory& pair, const FluxModel& model,
                     double t, double h, double y0, int n_paths, double sde_dt,
                     std::uint64_t seed);

struct ExitEstimate {
    double p_hat = 0.0;      // min over probed starts of the exit fraction
    double stderr_ = 0.0;    // binomial standard error at the minimizing start
    int n_paths = 0;
    double argmin_start = 0.0;
    std::vector<double> start_points;
    std::vector<double> exit_fractions;
};

/// Probes n_starts equispaced interior points; sde_dt <= 0 selects the
/// default min(pair stride, h/200).
ExitEstimate estimate_p_inf(const PairTrajectory& pair, const FluxModel& model,
                            double t, double h, int n_starts, int n_paths,
                            std::uint64_t seed, double sde_dt = 0.0, int workers = 1);

struct BoundAudit {
    bool pass = false;
    bool bound_numerically_zero = false;
    double p_hat = 0.0;
    double bound = 0.0;
};

/// pass iff p_hat + 3 stderr >= bound.
BoundAudit bound_audit(const ExitEstimate& estimate, double bound_value);

/// sup over the stored states in [t, t+h] of max_i |B(u_i, v_i)|.
double pair_secant_sup(const PairTrajectory& pair, const FluxModel& model, double t, double h);

} // namespace synclaw
