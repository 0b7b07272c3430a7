#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "synclaw/exit_prob.hpp"

using namespace synclaw;

namespace {
constexpr double kPi = 3.14159265358979323846;

// flux-free pair run: drift is identically zero, the process is pure
// sqrt(2)-diffusion killed at the boundary
PairTrajectory heat_pair(const Grid& g, double t_final, int stride) {
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = t_final;
    cfg.state_stride = stride;
    const Field u0 = sample_field(g, [](double x) { return std::sin(kPi * x); });
    return couple_evolve(u0, make_field(g), zero_flux_model(), nullptr, nullptr, cfg);
}

double survival_series(double y, double h) {
    double acc = 0.0;
    for (int k = 1; k <= 999; k += 2)
        acc += 4.0 / (k * kPi) * std::sin(k * kPi * y) * std::exp(-k * k * kPi * kPi * h);
    return acc;
}
} // namespace

TEST_CASE("girsanov bound constants and value") {
    const Grid g = build_grid(1.0, 16);
    const GirsanovBound b = make_girsanov_bound(g);
    const double erf_val = std::erf(1.0 / std::sqrt(2.0));
    CHECK(b.small_ball_c == doctest::Approx(erf_val * erf_val));
    CHECK(b.small_ball_c == doctest::Approx(0.4661).epsilon(1e-3));
    CHECK(b.geometric_C == doctest::Approx(2.0));
    CHECK(b.value(1.0, 0.0) == doctest::Approx(0.4661 * std::exp(-2.0)).epsilon(1e-3));
    CHECK(b.value(1.0, 0.0) == doctest::Approx(0.0631).epsilon(2e-2));
}

TEST_CASE("girsanov bound monotonicity and domain") {
    const Grid g = build_grid(1.0, 16);
    const GirsanovBound b = make_girsanov_bound(g);
    CHECK(b.value(0.5, 0.0) < b.value(1.0, 0.0));
    CHECK(b.value(1.0, 2.0) < b.value(1.0, 1.0));
    CHECK(b.value(1.0, 0.0) > 0.0);
    CHECK(b.value(1.0, 0.0) < 1.0);
    CHECK_THROWS_AS(b.value(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(b.value(1.5, 1.0), std::invalid_argument);
    // vanishes as the drift bound blows up
    CHECK(b.value(1.0, 50.0) < 1e-300);
}

TEST_CASE("simulate_exit basic behaviour") {
    const Grid g = build_grid(1.0, 64);
    const PairTrajectory pair = heat_pair(g, 5.0, 50);
    SUBCASE("long window forces exit") {
        const double frac = simulate_exit(pair, zero_flux_model(), 0.0, 5.0, 0.5, 2000, 2.5e-3, 1);
        CHECK(frac >= 0.99);
    }
    SUBCASE("short window keeps the path inside") {
        const double frac = simulate_exit(pair, zero_flux_model(), 0.0, 1e-4, 0.5, 2000, 1e-5, 1);
        CHECK(frac <= 0.01);
    }
    SUBCASE("start next to the boundary exits quickly") {
        // reflection oracle: hitting probability of the near wall alone is
        // 2 P(N(0, 2h) > y0), essentially 1 for y0 = dx/2 and h = 0.01
        const double y0 = g.dx / 2.0;
        const double frac = simulate_exit(pair, zero_flux_model(), 0.0, 0.01, y0, 2000, 1e-4, 1);
        CHECK(frac > 0.5);
    }
    SUBCASE("argument validation") {
        CHECK_THROWS_AS(simulate_exit(pair, zero_flux_model(), 0.0, 0.1, 0.5, 1000, 0.2, 1),
                        std::invalid_argument);  // sde_dt > h
        CHECK_THROWS_AS(simulate_exit(pair, zero_flux_model(), 0.0, 0.1, -0.5, 1000, 1e-3, 1),
                        std::invalid_argument);
        CHECK_THROWS_AS(simulate_exit(pair, zero_flux_model(), 0.0, 0.1, 0.5, 0, 1e-3, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("estimate_p_inf: symmetry, duality, refinement") {
    const Grid g = build_grid(1.0, 128);
    const PairTrajectory pair = heat_pair(g, 0.2, 1);
    const double h = 0.1;
    const ExitEstimate est = estimate_p_inf(pair, zero_flux_model(), 0.0, h, 15, 4000, 7, 0.0, 2);
    SUBCASE("the minimizing start sits at the center") {
        CHECK(std::abs(est.argmin_start - 0.5) <= 0.15);
        CHECK(est.stderr_ <= 0.5 / std::sqrt(4000.0));
    }
    SUBCASE("duality with the killed-diffusion series") {
        const double exact = 1.0 - survival_series(0.5, h);
        CHECK(std::abs(est.p_hat - exact) <= 3.0 * (est.stderr_ + 0.01));
    }
    SUBCASE("duality with the kernel mass loss") {
        const KernelMassLoss kml = kernel_mass_loss(pair, zero_flux_model(), 0.0, h, 2);
        CHECK(std::abs(est.p_hat - kml.p_hat) <= 3.0 * (est.stderr_ + 10.0 * g.dx));
    }
    SUBCASE("doubling the paths moves the estimate within noise") {
        const ExitEstimate est2 =
            estimate_p_inf(pair, zero_flux_model(), 0.0, h, 15, 8000, 7, 0.0, 2);
        CHECK(std::abs(est.p_hat - est2.p_hat) <= 3.0 * (est.stderr_ + est2.stderr_));
    }
    SUBCASE("monotone in the window length") {
        const ExitEstimate shorter =
            estimate_p_inf(pair, zero_flux_model(), 0.0, 0.05, 15, 4000, 7, 0.0, 2);
        CHECK(shorter.p_hat <= est.p_hat + 3.0 * (shorter.stderr_ + est.stderr_));
    }
    SUBCASE("n_paths = 0 rejected") {
        CHECK_THROWS_AS(estimate_p_inf(pair, zero_flux_model(), 0.0, h, 15, 0, 7, 0.0, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("bound audit") {
    const Grid g = build_grid(1.0, 64);
    const GirsanovBound gb = make_girsanov_bound(g);
    SUBCASE("flux-free estimate clears the bound at h = 1") {
        const PairTrajectory pair = heat_pair(g, 1.0, 10);
        const ExitEstimate est =
            estimate_p_inf(pair, zero_flux_model(), 0.0, 1.0, 9, 2000, 11, 0.0, 2);
        // with the sqrt(2) diffusion the exit within h = 1 is near certain
        CHECK(est.p_hat > 0.99);
        const BoundAudit audit = bound_audit(est, gb.value(1.0, 0.0));
        CHECK(audit.pass);
    }
    SUBCASE("fabricated zero estimate fails") {
        ExitEstimate fake;
        fake.p_hat = 0.0;
        fake.stderr_ = 0.0;
        fake.n_paths = 100;
        CHECK_FALSE(bound_audit(fake, 0.063).pass);
    }
    SUBCASE("underflowing bound reported as numerically zero") {
        ExitEstimate est;
        est.p_hat = 0.2;
        est.stderr_ = 0.01;
        const double tiny = gb.value(0.05, 5.0);  // e^{-540}, flushes to zero
        const BoundAudit audit = bound_audit(est, tiny);
        CHECK(audit.pass);
        CHECK(audit.bound_numerically_zero);
    }
}

TEST_CASE("pair secant sup tracks the state magnitude") {
    const Grid g = build_grid(1.0, 64);
    const PairTrajectory pair = heat_pair(g, 0.2, 1);
    const double b0 = pair_secant_sup(pair, burgers_model(), 0.0, 0.05);
    CHECK(b0 > 0.0);
    CHECK(b0 <= 1.0 + 1e-12);  // burgers secant bounded by the sup norm (= 1 here)
}
