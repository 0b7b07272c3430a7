#include "synclaw/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace synclaw {

Grid build_grid(double length, int n_cells) {
    if (!(length > 0.0) || !std::isfinite(length))
        throw std::invalid_argument("build_grid: length must be positive");
    if (n_cells < 3)
        throw std::invalid_argument("build_grid: n_cells must be >= 3");
    Grid g;
    g.length = length;
    g.n_cells = n_cells;
    g.dx = length / n_cells;
    g.centers.resize(static_cast<std::size_t>(n_cells));
    for (int i = 0; i < n_cells; ++i)
        g.centers[static_cast<std::size_t>(i)] = (i + 0.5) * g.dx;
    return g;
}

Field make_field(const Grid& grid, double fill) {
    Field f;
    f.grid = &grid;
    f.values.assign(static_cast<std::size_t>(grid.n_cells), fill);
    return f;
}

Field sample_field(const Grid& grid, const std::function<double(double)>& fn) {
    Field f = make_field(grid);
    for (int i = 0; i < grid.n_cells; ++i) f[i] = fn(grid.centers[static_cast<std::size_t>(i)]);
    return f;
}

bool all_finite(const Field& f) {
    for (double v : f.values)
        if (!std::isfinite(v)) return false;
    return true;
}

void require_nonnegative(const Field& f, double tol) {
    for (int i = 0; i < f.size(); ++i)
        if (f[i] < -tol)
            throw std::runtime_error("field negative beyond tolerance at cell " +
                                     std::to_string(i) + ": " + std::to_string(f[i]));
}

Field apply_laplacian(const Field& f) {
    const Grid& g = *f.grid;
    const int n = g.n_cells;
    const double inv_dx2 = 1.0 / (g.dx * g.dx);
    Field out = make_field(g);
    for (int i = 0; i < n; ++i) {
        const double left = (i == 0) ? -f[0] : f[i - 1];
        const double right = (i == n - 1) ? -f[n - 1] : f[i + 1];
        out[i] = (left - 2.0 * f[i] + right) * inv_dx2;
    }
    return out;
}

Field implicit_diffusion_step(const Field& f, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("implicit_diffusion_step: dt must be positive");
    const Grid& g = *f.grid;
    const int n = g.n_cells;
    const double r = dt / (g.dx * g.dx);

    // Thomas elimination for the symmetric tridiagonal M-matrix
    //   diag: 1 + 3r at boundary rows (mirror ghost), 1 + 2r inside
    //   off:  -r
    std::vector<double> c_prime(static_cast<std::size_t>(n));
    std::vector<double> d_prime(static_cast<std::size_t>(n));
    auto diag = [&](int i) { return (i == 0 || i == n - 1) ? 1.0 + 3.0 * r : 1.0 + 2.0 * r; };

    double beta = diag(0);
    c_prime[0] = -r / beta;
    d_prime[0] = f[0] / beta;
    for (int i = 1; i < n; ++i) {
        beta = diag(i) + r * c_prime[static_cast<std::size_t>(i - 1)];
        c_prime[static_cast<std::size_t>(i)] = -r / beta;
        d_prime[static_cast<std::size_t>(i)] =
            (f[i] + r * d_prime[static_cast<std::size_t>(i - 1)]) / beta;
    }
    Field out = make_field(g);
    out[n - 1] = d_prime[static_cast<std::size_t>(n - 1)];
    for (int i = n - 2; i >= 0; --i)
        out[i] = d_prime[static_cast<std::size_t>(i)] -
                 c_prime[static_cast<std::size_t>(i)] * out[i + 1];

    // residual check: ||(I - dt Lap) g - f||_inf <= 1e-12 ||f||_inf
    double f_inf = 0.0;
    for (double v : f.values) f_inf = std::max(f_inf, std::abs(v));
    const Field lap = apply_laplacian(out);
    double resid = 0.0;
    for (int i = 0; i < n; ++i)
        resid = std::max(resid, std::abs(out[i] - dt * lap[i] - f[i]));
    if (resid > 1e-12 * std::max(f_inf, 1e-300) && f_inf > 0.0)
        throw std::runtime_error("implicit_diffusion_step: residual " +
                                 std::to_string(resid) + " exceeds tolerance");
    return out;
}

Field divergence_of_face_flux(std::span<const double> face_flux, const Grid& grid) {
    const int n = grid.n_cells;
    if (static_cast<int>(face_flux.size()) != n + 1)
        throw std::invalid_argument("divergence_of_face_flux: need n_cells + 1 face values");
    for (double v : face_flux)
        if (!std::isfinite(v))
            throw std::invalid_argument("divergence_of_face_flux: non-finite face flux");
    Field out = make_field(grid);
    const double inv_dx = 1.0 / grid.dx;
    for (int i = 0; i < n; ++i)
        out[i] = (face_flux[static_cast<std::size_t>(i + 1)] -
                  face_flux[static_cast<std::size_t>(i)]) * inv_dx;
    return out;
}

double boundary_normal_gradient(const Field& w) {
    const Grid& g = *w.grid;
    return -2.0 * (w[0] + w[g.n_cells - 1]) / g.dx;
}

double lp_norm(const Field& f, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    if (p == kPInf) {
        double m = 0.0;
        for (double v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    const double dx = f.grid->dx;
    double acc = 0.0;
    for (double v : f.values) acc += std::pow(std::abs(v), p);
    return std::pow(dx * acc, 1.0 / p);
}

} // namespace synclaw
