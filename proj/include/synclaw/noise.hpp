// Forcing: a deterministic time-bounded component psi_0 plus finitely many
// spatial modes psi_k driven by independent Brownian increments, the induced
// Dirichlet-heat convolution z, and empirical regularity statistics for z.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "synclaw/grid.hpp"

namespace synclaw {

// Spatial shapes are Dirichlet sine modes sin(k pi x / L); amplitudes scale
// them. No runtime expression parsing: shapes are named built-ins.
struct NoiseMode {
    int index = 1;          // sine mode number k >= 1
    double amplitude = 0.0;
    bool operator==(const NoiseMode&) const = default;
};

struct Psi0Spec {
    std::string time_profile = "zero";  // "zero" | "one"
    int index = 1;                      // sine mode number of the spatial factor
    double amplitude = 0.0;
    bool operator==(const Psi0Spec&) const = default;
};

struct NoiseSpec {
    const Grid* grid = nullptr;
    std::vector<NoiseMode> mode_descr;
    std::vector<Field> modes;  // psi_k sampled at cell centers
    Psi0Spec psi0;
    double hoelder_exponent = 1.0;

    int n_modes() const { return static_cast<int>(modes.size()); }
    double psi0_value(double t, double x) const;
    Field psi0_field(double t) const;
    /// sup over the sampled horizon and cells of |psi_0| (finite by
    /// construction for the built-in profiles; checked at config time).
    double psi0_sup(double t_final) const;
};

NoiseSpec make_noise_spec(const Grid& grid, std::vector<NoiseMode> modes,
                          Psi0Spec psi0, double hoelder_exponent = 1.0);

struct NoisePath {
    std::uint64_t seed = 0;
    double dt = 0.0;
    int n_steps = 0;
    int n_modes = 0;
    std::vector<double> increments;  // row-major [step][mode], dB ~ N(0, dt)

    double increment(int step, int mode) const {
        return increments[static_cast<std::size_t>(step) * n_modes + mode];
    }
};

/// Deterministic function of (seed, dt, n_steps, n_modes); each mode draws
/// from its own derived stream.
NoisePath sample_path(const NoiseSpec& spec, std::uint64_t seed, double dt, int n_steps);

struct ZWindowStat {
    double t_begin = 0.0;
    double t_end = 0.0;
    double sup_c0 = 0.0;  // sup over window of max |z|
    double sup_c1 = 0.0;  // sup over window of max one-sided difference quotient
};

struct ZTrajectory {
    std::vector<double> times;
    std::vector<Field> states;               // z(t_j), z(0) = 0
    std::vector<ZWindowStat> window_stats;   // unit windows
};

/// Advances z by forcing injection followed by an implicit diffusion step.
ZTrajectory evolve_z(const NoiseSpec& spec, const NoisePath& path, const Grid& grid);

struct ZRegularityStats {
    double sup_c0 = 0.0;
    double sup_c1 = 0.0;
    double max_over_median = 0.0;  // max window sup_c0 over median window sup_c0
    bool superlinear_flag = false; // running max grows faster than the log(t) heuristic allows
};

ZRegularityStats z_regularity_stats(const ZTrajectory& traj);

// Constants entering the super-solution coefficients.
struct ZStats {
    double z_sup = 0.0;       // sup_{t <= T} ||z_t||_inf
    double z_grad_sum = 0.0;  // sup_{t <= T} of the max difference quotient
};

ZStats z_stats_for_horizon(const ZTrajectory& traj, double t_final);

/// Max one-sided difference quotient of f, boundary quotients taken against
/// the zero trace over the half cell.
double max_difference_quotient(const Field& f);

} // namespace synclaw
