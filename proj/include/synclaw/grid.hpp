// Uniform 1D cell-centered grid on (0, L) with homogeneous Dirichlet
// boundary, and the discrete operators shared by all solvers.
//
// Dirichlet boundary convention: the boundary trace is zero at the cell
// faces x = 0 and x = L. For the diffusion operator this is realized by
// odd-reflection ghost cells (ghost = -adjacent), which makes the discrete
// sine modes sin(k pi x / L) exact eigenvectors of the Laplacian with
// eigenvalue -(2/dx^2)(1 - cos(k pi dx / L)). For advective fluxes the
// ghost state is the boundary value itself (zero).
#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace synclaw {

inline constexpr double kPInf = std::numeric_limits<double>::infinity();

struct Grid {
    double length = 0.0;   // L
    int n_cells = 0;
    double dx = 0.0;
    std::vector<double> centers;  // x_i = (i + 1/2) dx

    // D = max over cell centers of |x| (1D specialization of the span
    // constant entering the super-solution coefficients).
    double domain_span() const { return centers.back(); }
};

/// Builds a uniform cell-centered grid. Throws std::invalid_argument for
/// non-positive length or n_cells < 3.
Grid build_grid(double length, int n_cells);

struct Field {
    const Grid* grid = nullptr;
    std::vector<double> values;

    double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
    int size() const { return static_cast<int>(values.size()); }
};

Field make_field(const Grid& grid, double fill = 0.0);
Field sample_field(const Grid& grid, const std::function<double(double)>& f);

/// True if every entry is finite.
bool all_finite(const Field& f);

/// Throws std::runtime_error if any entry is below -tol.
void require_nonnegative(const Field& f, double tol = 1e-12);

/// Discrete Dirichlet Laplacian (odd-reflection ghosts) applied to f.
Field apply_laplacian(const Field& f);

/// Solves (I - dt*Lap) g = f by direct tridiagonal elimination. The solve is
/// exact to rounding; the residual is checked against 1e-12 * ||f||_inf.
Field implicit_diffusion_step(const Field& f, double dt);

/// Conservative divergence: cell i gets (flux[i+1] - flux[i]) / dx.
/// face_flux has n_cells + 1 entries.
Field divergence_of_face_flux(std::span<const double> face_flux, const Grid& grid);

/// Discrete boundary integral of the outward normal gradient against the
/// zero Dirichlet trace: -2 (w_0 + w_{n-1}) / dx. Equals dx * sum(Lap w)
/// exactly (discrete divergence theorem).
double boundary_normal_gradient(const Field& w);

/// (dx * sum |f_i|^p)^(1/p); p = infinity gives max |f_i|. Requires p >= 1.
double lp_norm(const Field& f, double p);

} // namespace synclaw
