#include "synclaw/exit_prob.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "synclaw/parallel.hpp"
#include "synclaw/rng.hpp"

namespace synclaw {

double GirsanovBound::value(double h, double B_sup) const {
    if (!(h > 0.0 && h <= 1.0))
        throw std::invalid_argument("girsanov bound: h must lie in (0, 1]");
    return small_ball_c * std::exp(-(geometric_C + B_sup * B_sup) / h);
}

GirsanovBound make_girsanov_bound(const Grid& grid) {
    GirsanovBound b;
    const double erf_val = std::erf(1.0 / std::sqrt(2.0));
    b.small_ball_c = erf_val * erf_val;
    b.geometric_C = grid.length + 1.0;
    return b;
}

double girsanov_bound_value(const Grid& grid, double h, double B_sup) {
    return make_girsanov_bound(grid).value(h, B_sup);
}

namespace {

// Drift at (step time bucket, x): linear interpolation between cell-center
// secant values, anchored at the boundaries by the diagonal value B(0, 0).
class FrozenDrift {
public:
    FrozenDrift(const PairTrajectory& pair, const FluxModel& model)
        : pair_(pair), grid_(pair.grid()), boundary_value_(model.dflux(0.0)) {
        coeffs_.resize(pair.state_steps.size());
        for (std::size_t s = 0; s < pair.state_steps.size(); ++s) {
            const Field& u = pair.u_states[s];
            const Field& v = pair.v_states[s];
            auto& c = coeffs_[s];
            c.resize(static_cast<std::size_t>(grid_.n_cells));
            for (int i = 0; i < grid_.n_cells; ++i)
                c[static_cast<std::size_t>(i)] = secant_slope(model, u[i], v[i]);
        }
    }

    double operator()(double t, double x) const {
        const std::size_t s = pair_.snapshot_at_or_before(t);
        const auto& c = coeffs_[s];
        const double dx = grid_.dx;
        if (x <= grid_.centers.front())
            return boundary_value_ + (c[0] - boundary_value_) * std::max(0.0, x) / grid_.centers.front();
        if (x >= grid_.centers.back()) {
            const double span = grid_.length - grid_.centers.back();
            const double w = std::min(1.0, (grid_.length - x) / span);
            return boundary_value_ + (c.back() - boundary_value_) * w;
        }
        const int i = std::min(grid_.n_cells - 2,
                               static_cast<int>((x - grid_.centers.front()) / dx));
        const double w = (x - grid_.centers[static_cast<std::size_t>(i)]) / dx;
        return c[static_cast<std::size_t>(i)] * (1.0 - w) + c[static_cast<std::size_t>(i + 1)] * w;
    }

private:
    const PairTrajectory& pair_;
    const Grid& grid_;
    double boundary_value_;
    std::vector<std::vector<double>> coeffs_;
};

int count_exits(const FrozenDrift& drift, const Grid& grid, double t, double h,
                double y0, int n_paths, double sde_dt, std::uint64_t seed,
                std::uint64_t start_tag) {
    const int n_sub = std::max(1, static_cast<int>(std::ceil(h / sde_dt)));
    const double dt = h / n_sub;
    const double noise_scale = std::sqrt(2.0 * dt);
    int exits = 0;
    for (int p = 0; p < n_paths; ++p) {
        GaussianStream stream(derive_stream(seed, 0xe817, start_tag, static_cast<std::uint64_t>(p)));
        double x = y0;
        bool exited = false;
        for (int k = 0; k < n_sub; ++k) {
            x += drift(t + k * dt, x) * dt + noise_scale * stream.next();
            if (x <= 0.0 || x >= grid.length) {
                exited = true;
                break;
            }
        }
        if (exited) ++exits;
    }
    return exits;
}

} // namespace

double simulate_exit(const PairTrajectory& pair, const FluxModel& model,
                     double t, double h, double y0, int n_paths, double sde_dt,
                     std::uint64_t seed) {
    const Grid& grid = pair.grid();
    if (!(h > 0.0)) throw std::invalid_argument("simulate_exit: h must be positive");
    if (sde_dt > h) throw std::invalid_argument("simulate_exit: sde_dt exceeds h");
    if (n_paths <= 0) throw std::invalid_argument("simulate_exit: n_paths must be positive");
    if (!(y0 > 0.0 && y0 < grid.length))
        throw std::invalid_argument("simulate_exit: start point must be interior");
    if (t + h > pair.times.back() + 1e-9)
        throw std::invalid_argument("simulate_exit: window beyond the stored run");
    const FrozenDrift drift(pair, model);
    const int exits = count_exits(drift, grid, t, h, y0, n_paths, sde_dt, seed, 0);
    return static_cast<double>(exits) / n_paths;
}

ExitEstimate estimate_p_inf(const PairTrajectory& pair, const FluxModel& model,
                            double t, double h, int n_starts, int n_paths,
                            std::uint64_t seed, double sde_dt, int workers) {
    if (n_paths <= 0) throw std::invalid_argument("estimate_p_inf: n_paths must be positive");
    if (n_starts <= 0) throw std::invalid_argument("estimate_p_inf: n_starts must be positive");
    const Grid& grid = pair.grid();
    const double stride_dt = pair.dt * std::max(1, pair.state_steps.size() > 1
                                                       ? pair.state_steps[1] - pair.state_steps[0]
                                                       : 1);
    if (sde_dt <= 0.0) sde_dt = std::min(stride_dt, h / 200.0);

    ExitEstimate est;
    est.n_paths = n_paths;
    est.start_points.resize(static_cast<std::size_t>(n_starts));
    est.exit_fractions.assign(static_cast<std::size_t>(n_starts), 0.0);
    for (int s = 0; s < n_starts; ++s)
        est.start_points[static_cast<std::size_t>(s)] = grid.length * (s + 1) / (n_starts + 1);

    const FrozenDrift drift(pair, model);
    parallel_for_ordered(n_starts, workers, [&](int s) {
        const int exits = count_exits(drift, grid, t, h,
                                      est.start_points[static_cast<std::size_t>(s)],
                                      n_paths, sde_dt, seed,
                                      static_cast<std::uint64_t>(s) + 1);
        est.exit_fractions[static_cast<std::size_t>(s)] = static_cast<double>(exits) / n_paths;
    });

    est.p_hat = kPInf;
    for (int s = 0; s < n_starts; ++s) {
        const double frac = est.exit_fractions[static_cast<std::size_t>(s)];
        if (frac < est.p_hat) {
            est.p_hat = frac;
            est.argmin_start = est.start_points[static_cast<std::size_t>(s)];
        }
    }
    est.stderr_ = std::sqrt(std::max(0.0, est.p_hat * (1.0 - est.p_hat)) / n_paths);
    return est;
}

BoundAudit bound_audit(const ExitEstimate& estimate, double bound_value) {
    BoundAudit audit;
    audit.p_hat = estimate.p_hat;
    audit.bound = bound_value;
    audit.bound_numerically_zero = bound_value < 1e-15;
    audit.pass = estimate.p_hat + 3.0 * estimate.stderr_ >= bound_value;
    return audit;
}

double pair_secant_sup(const PairTrajectory& pair, const FluxModel& model, double t, double h) {
    double sup = 0.0;
    for (std::size_t s = 0; s < pair.state_steps.size(); ++s) {
        const double ts = pair.state_steps[s] * pair.dt;
        if (ts < t - 1e-12 || ts > t + h + 1e-12) continue;
        const Field& u = pair.u_states[s];
        const Field& v = pair.v_states[s];
        for (int i = 0; i < u.size(); ++i)
            sup = std::max(sup, std::abs(secant_slope(model, u[i], v[i])));
    }
    return sup;
}

} // namespace synclaw
