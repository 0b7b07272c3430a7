#include "synclaw/flux.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace synclaw {

FluxModel::FluxModel(std::string name,
                     std::function<double(double)> flux,
                     std::function<double(double)> dflux,
                     std::optional<CoercivityParams> coercivity,
                     double growth_exponent)
    : name_(std::move(name)),
      flux_(std::move(flux)),
      dflux_(std::move(dflux)),
      coercivity_(coercivity),
      growth_exponent_(growth_exponent) {
    if (coercivity_ && !(coercivity_->alpha > 0.0))
        throw std::invalid_argument("FluxModel: coercivity alpha must be positive");
    if (coercivity_ && coercivity_->beta < 0.0)
        throw std::invalid_argument("FluxModel: coercivity beta must be nonnegative");
    if (!(growth_exponent_ >= 1.0))
        throw std::invalid_argument("FluxModel: growth exponent must be >= 1");
}

double FluxModel::lipschitz_bound_on(Interval range, int n_samples) const {
    if (range.hi < range.lo) std::swap(range.lo, range.hi);
    if (n_samples < 2) n_samples = 2;
    double sup = 0.0;
    const double step = (range.hi - range.lo) / (n_samples - 1);
    for (int i = 0; i < n_samples; ++i)
        sup = std::max(sup, std::abs(dflux_(range.lo + step * i)));
    return sup;
}

FluxModel burgers_model() {
    return FluxModel("burgers",
                     [](double u) { return 0.5 * u * u; },
                     [](double u) { return u; },
                     CoercivityParams{1.0, 0.0},
                     2.0);
}

FluxModel coercive_quadratic_model(double alpha, double beta) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("coercive_quadratic: alpha must be positive");
    return FluxModel("coercive_quadratic",
                     [alpha](double u) { return 0.5 * alpha * u * u; },
                     [alpha](double u) { return alpha * u; },
                     CoercivityParams{alpha, beta},
                     2.0);
}

FluxModel zero_flux_model() {
    return FluxModel("zero",
                     [](double) { return 0.0; },
                     [](double) { return 0.0; },
                     std::nullopt,
                     1.0);
}

FluxModel linear_flux_model(double speed) {
    return FluxModel("linear",
                     [speed](double u) { return speed * u; },
                     [speed](double) { return speed; },
                     std::nullopt,
                     1.0);
}

double secant_slope(const FluxModel& model, double a, double b) {
    const double eps = 1e-8 * (1.0 + std::abs(a) + std::abs(b));
    if (std::abs(a - b) <= eps) return model.dflux(0.5 * (a + b));
    return (model.flux(a) - model.flux(b)) / (a - b);
}

CoercivityReport check_coercivity(const FluxModel& model, Interval range, int n_samples) {
    if (!model.coercivity())
        throw std::invalid_argument("check_coercivity: model lacks coercivity parameters");
    if (n_samples < 2)
        throw std::invalid_argument("check_coercivity: n_samples must be >= 2");
    const auto [alpha, beta] = *model.coercivity();
    CoercivityReport report;
    report.worst_margin = kPInf;
    const double step = (range.hi - range.lo) / (n_samples - 1);
    for (int i = 0; i < n_samples; ++i) {
        const double u = range.lo + step * i;
        const double sgn = (u > 0.0) - (u < 0.0);
        const double margin = model.dflux(u) * sgn - alpha * std::abs(u) + beta;
        if (margin < report.worst_margin) {
            report.worst_margin = margin;
            report.worst_u = u;
        }
    }
    report.pass = report.worst_margin >= -1e-9;
    return report;
}

double check_growth(const FluxModel& model, Interval range, int n_samples) {
    const double a = model.growth_exponent();
    if (a == kPInf)
        throw std::invalid_argument("check_growth: growth exponent is infinite");
    if (n_samples < 2)
        throw std::invalid_argument("check_growth: n_samples must be >= 2");
    double c = 0.0;
    const double step = (range.hi - range.lo) / (n_samples - 1);
    for (int i = 0; i < n_samples; ++i) {
        const double u = range.lo + step * i;
        const double denom = std::pow(1.0 + std::abs(u), a);
        c = std::max(c, std::max(std::abs(model.flux(u)), std::abs(model.dflux(u))) / denom);
    }
    return c;
}

} // namespace synclaw
