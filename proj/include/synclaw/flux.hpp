// Scalar flux nonlinearities: the flux A, its derivative, coercivity /
// growth classification, and the secant slope B(u, v) driving the
// difference equation.
#pragma once

#include <functional>
#include <optional>
#include <string>

#include "synclaw/grid.hpp"

namespace synclaw {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const Interval&) const = default;
};

struct CoercivityParams {
    double alpha = 0.0;  // positive
    double beta = 0.0;   // nonnegative
};

class FluxModel {
public:
    FluxModel(std::string name,
              std::function<double(double)> flux,
              std::function<double(double)> dflux,
              std::optional<CoercivityParams> coercivity,
              double growth_exponent);

    double flux(double u) const { return flux_(u); }
    double dflux(double u) const { return dflux_(u); }
    const std::optional<CoercivityParams>& coercivity() const { return coercivity_; }
    double growth_exponent() const { return growth_exponent_; }
    const std::string& name() const { return name_; }

    /// Sampled sup of |A'| over the interval (mean-value bound for the
    /// secant slope over the corresponding box).
    double lipschitz_bound_on(Interval range, int n_samples = 1024) const;

private:
    std::string name_;
    std::function<double(double)> flux_;
    std::function<double(double)> dflux_;
    std::optional<CoercivityParams> coercivity_;
    double growth_exponent_;
};

FluxModel burgers_model();                                    // A = u^2/2
FluxModel coercive_quadratic_model(double alpha, double beta); // A = alpha u^2/2
FluxModel zero_flux_model();                                  // A = 0
FluxModel linear_flux_model(double speed);                    // A = c u

/// Secant slope B(a, b) = (A(a) - A(b)) / (a - b), continued across the
/// diagonal by A'((a+b)/2) when |a - b| <= 1e-8 (1 + |a| + |b|).
double secant_slope(const FluxModel& model, double a, double b);

struct CoercivityReport {
    bool pass = false;
    double worst_margin = 0.0;  // min of A'(u) sign(u) - alpha|u| + beta
    double worst_u = 0.0;
};

/// Samples the coercivity inequality on [range.lo, range.hi]; pass means the
/// worst margin is >= -1e-9. Throws if the model carries no coercivity params.
CoercivityReport check_coercivity(const FluxModel& model, Interval range, int n_samples);

/// Smallest admissible growth constant on the sample set:
/// max over u of max(|A(u)|, |A'(u)|) / (1 + |u|)^a. Requires a < infinity.
double check_growth(const FluxModel& model, Interval range, int n_samples);

} // namespace synclaw
