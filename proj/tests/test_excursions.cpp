#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "synclaw/excursions.hpp"

using namespace synclaw;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Builds a pair trajectory whose norm series are prescribed directly; the
// stopping-time logic only reads the series, not the states.
PairTrajectory synthetic_pair(const std::vector<double>& pair_lp_each, double dt, int p = 2) {
    PairTrajectory pair;
    pair.norm_p = p;
    pair.dt = dt;
    static Grid grid = build_grid(1.0, 8);
    for (std::size_t k = 0; k < pair_lp_each.size(); ++k) {
        pair.times.push_back(k * dt);
        const double value = pair_lp_each[k];
        // put the whole pair norm into u, v stays zero
        pair.u_lp_pow.push_back(std::pow(value, p));
        pair.v_lp_pow.push_back(0.0);
        pair.sup_norms.push_back(value);
        pair.u_linf.push_back(value);
        pair.v_linf.push_back(0.0);
        pair.w_l1.push_back(value);
    }
    pair.state_steps.push_back(0);
    pair.u_states.push_back(make_field(grid));
    pair.v_states.push_back(make_field(grid));
    return pair;
}

CenterSets basic_centers() {
    CenterSets c;
    c.p = 2;
    c.R1 = 1.0;
    c.R2 = 2.0;
    c.R3 = 4.0;
    c.Rbar1 = 1.0;
    c.Rbar2 = 3.0;
    return c;
}

GirsanovBound unit_bound() {
    Grid g = build_grid(1.0, 8);
    return make_girsanov_bound(g);
}
} // namespace

TEST_CASE("center set validation names the violated invariant") {
    CenterSets c = basic_centers();
    c.Rbar1 = 5.0;  // above Rbar2
    CHECK_THROWS_WITH_AS(c.validate(), "center sets: require Rbar1 < Rbar2",
                         std::invalid_argument);
    c = basic_centers();
    c.R2 = 0.5;
    CHECK_THROWS_WITH_AS(c.validate(), "center sets: require R1 < R2", std::invalid_argument);
}

TEST_CASE("classification of a path pinned inside the inner center") {
    // stays at norm 0.5 < R1 throughout: sigma = tau, caps fire every unit
    const double dt = 0.1;
    std::vector<double> series(101, 0.5);  // horizon 10
    const PairTrajectory pair = synthetic_pair(series, dt);
    const ExcursionRecord rec = classify_excursions(pair, basic_centers());
    REQUIRE(rec.rows.size() >= 9);
    for (const auto& row : rec.rows) {
        CHECK(row.S == doctest::Approx(0.0));
        CHECK(row.T == doctest::Approx(1.0));
        CHECK(row.tau_in == doctest::Approx(row.sigma));  // already inside the L-inf center
        CHECK(row.T_inf == doctest::Approx(1.0));
    }
    CHECK(rec.rows[0].tau == doctest::Approx(0.0));
    CHECK(rec.rows[0].tau_next == doctest::Approx(1.0));
    CHECK_FALSE(rec.truncated_tail);
}

TEST_CASE("exit from the outer shell cuts the excursion before the cap") {
    const double dt = 0.1;
    std::vector<double> series;
    for (int k = 0; k <= 60; ++k) {
        const double t = k * dt;
        series.push_back(t >= 0.3 && t < 0.5 ? 5.0 : 0.5);  // leaves R3 = 4 at t = 0.3
    }
    const PairTrajectory pair = synthetic_pair(series, dt);
    const ExcursionRecord rec = classify_excursions(pair, basic_centers());
    REQUIRE(!rec.rows.empty());
    CHECK(rec.rows[0].sigma == doctest::Approx(0.0));
    CHECK(rec.rows[0].tau_next == doctest::Approx(0.3));  // not capped
    // next cycle starts outside the middle set, so sigma waits for the return
    REQUIRE(rec.rows.size() >= 2);
    CHECK(rec.rows[1].tau == doctest::Approx(0.3));
    CHECK(rec.rows[1].sigma == doctest::Approx(0.5));
    CHECK(rec.rows[1].S == doctest::Approx(0.2));
}

TEST_CASE("partition property: excursions tile the horizon") {
    const double dt = 0.05;
    std::vector<double> series;
    for (int k = 0; k <= 400; ++k) {
        const double t = k * dt;
        series.push_back(1.5 + std::sin(t * 2.2) + (std::fmod(t, 7.0) < 0.4 ? 3.5 : 0.0));
    }
    const PairTrajectory pair = synthetic_pair(series, dt);
    const ExcursionRecord rec = classify_excursions(pair, basic_centers());
    REQUIRE(!rec.rows.empty());
    double prev_end = 0.0;
    for (const auto& row : rec.rows) {
        CHECK(row.tau == doctest::Approx(prev_end));
        CHECK(row.sigma >= row.tau);
        CHECK(row.tau_next >= row.sigma);
        CHECK(row.tau_in <= row.tau_out);
        CHECK(row.tau_out <= row.tau_next + 1e-12);
        CHECK(row.T <= 1.0 + dt + 1e-12);
        prev_end = row.tau_next;
    }
}

TEST_CASE("c_of values and limits") {
    const GirsanovBound gb = unit_bound();
    SUBCASE("reference value at T = 1, B = 0") {
        CHECK(c_of(1.0, 0.0, gb) == doctest::Approx(-std::log(1.0 - 0.0631)).epsilon(0.02));
        CHECK(c_of(1.0, 0.0, gb) == doctest::Approx(0.0651).epsilon(0.02));
    }
    SUBCASE("monotone in T_inf, decreasing in B_sup") {
        CHECK(c_of(0.5, 0.0, gb) < c_of(1.0, 0.0, gb));
        CHECK(c_of(1.0, 2.0, gb) < c_of(1.0, 1.0, gb));
    }
    SUBCASE("limits") {
        CHECK(c_of(1.0, 40.0, gb) < 1e-300);
        CHECK(c_of(1e-3, 0.0, gb) < 1e-300);
        CHECK(c_of(1.2, 0.0, gb) == doctest::Approx(c_of(1.0, 0.0, gb)));  // clamped window
        CHECK_THROWS_AS(c_of(0.0, 0.0, gb), std::invalid_argument);
        CHECK_THROWS_AS(c_of(-1.0, 0.0, gb), std::invalid_argument);
    }
}

TEST_CASE("center time rate on synthetic records") {
    const GirsanovBound gb = unit_bound();
    SUBCASE("unit excursions reproduce the closed-form credit") {
        ExcursionRecord rec;
        rec.dt = 0.1;
        rec.horizon = 30.0;
        for (int i = 0; i < 15; ++i) {
            ExcursionRow row;
            row.tau = 2.0 * i;
            row.sigma = row.tau + 1.0;
            row.tau_next = row.sigma + 1.0;
            row.tau_in = row.sigma;
            row.tau_out = row.sigma + 1.0;
            row.S = 1.0;
            row.T = 1.0;
            row.T_inf = 1.0;
            rec.rows.push_back(row);
        }
        const CenterTimeRate rate = center_time_rate(rec, 0.0, 10.0, gb);
        CHECK(rate.X_t == 10);
        CHECK(rate.L_t == doctest::Approx(10.0 * c_of(1.0, 0.0, gb)));
        CHECK(rate.L_t == doctest::Approx(0.651).epsilon(0.02));
    }
    SUBCASE("empty record returns zeros") {
        const CenterTimeRate rate = center_time_rate(ExcursionRecord{}, 0.0, 10.0, gb);
        CHECK(rate.X_t == 0);
        CHECK(rate.L_t == 0.0);
        CHECK(rate.eta_hat == 0.0);
    }
}

TEST_CASE("moment audit") {
    CenterSets centers = basic_centers();
    SUBCASE("pinned trajectory gives unit means and passes") {
        ExcursionRecord rec;
        for (int i = 0; i < 200; ++i) {
            ExcursionRow row;
            row.S = 0.0;
            row.start_norm_pow = 0.2 + 0.001 * i;
            rec.rows.push_back(row);
        }
        const MomentAudit audit = moment_audit({rec}, centers, 0.05, 0.2);
        CHECK(audit.status == MomentAudit::Status::pass);
        CHECK(audit.ratio_max_over_min <= 10.0);
        for (const auto& bin : audit.bins) CHECK(bin.mean_exp_kappa_S == doctest::Approx(1.0));
    }
    SUBCASE("too few excursions reports insufficient data") {
        ExcursionRecord rec;
        for (int i = 0; i < 10; ++i) rec.rows.push_back(ExcursionRow{});
        const MomentAudit audit = moment_audit({rec}, centers, 0.05, 0.2);
        CHECK(audit.status == MomentAudit::Status::insufficient_data);
    }
    SUBCASE("adversarial kappa rejected at the precondition") {
        ExcursionRecord rec;
        for (int i = 0; i < 200; ++i) rec.rows.push_back(ExcursionRow{});
        CHECK_THROWS_AS(moment_audit({rec}, centers, 2.0, 0.2), std::invalid_argument);
    }
}

TEST_CASE("heat-only excursions concentrate near the deterministic re-entry time") {
    // flux-free decay from norm above the middle set: S is close to the
    // closed-form crossing time of the exponential decay
    const Grid g = build_grid(1.0, 64);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 2.0;
    cfg.norm_p = 2;
    const Field u0 = sample_field(g, [](double x) { return 8.0 * std::sin(kPi * x); });
    const PairTrajectory pair =
        couple_evolve(u0, make_field(g), zero_flux_model(), nullptr, nullptr, cfg);
    CenterSets centers;
    centers.p = 2;
    centers.R1 = 1.0;
    centers.R2 = 2.0;
    centers.R3 = 20.0;
    centers.Rbar1 = 2.0;
    centers.Rbar2 = 25.0;
    const ExcursionRecord rec = classify_excursions(pair, centers);
    REQUIRE(!rec.rows.empty());
    const double start_norm = std::pow(pair.u_lp_pow[0], 1.0 / 2.0);
    const double expected_S = std::log(start_norm / centers.R1) / (kPi * kPi);
    CHECK(rec.rows[0].S == doctest::Approx(expected_S).epsilon(0.05));
}

TEST_CASE("drift fit on an unforced decaying pilot gives a unit inner radius") {
    // flux-free decay: the fitted drift constant vanishes, so
    // R1 = (2 c2/c1 + 1)^(1/p) sits at 1
    const Grid g = build_grid(1.0, 64);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 1.0;
    cfg.norm_p = 2;
    const Field u0 = sample_field(g, [](double x) { return 3.0 * std::sin(kPi * x); });
    std::vector<PairTrajectory> pilots{
        couple_evolve(u0, make_field(g), zero_flux_model(), nullptr, nullptr, cfg)};
    const auto [c1, c2] = pair_drift_fit(pilots, 2);
    CHECK(c1 > 0.0);
    CHECK(c2 == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(std::pow(2.0 * c2 / c1 + 1.0, 0.5) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("calibration on drifting pilots") {
    // synthetic mean-reverting norm series: y' = -(y - 1) + wiggle, p = 2
    const double dt = 0.01;
    std::vector<PairTrajectory> pilots;
    for (int s = 0; s < 4; ++s) {
        std::vector<double> series;
        double y = 4.0 + s;
        for (int k = 0; k <= 6000; ++k) {
            series.push_back(std::sqrt(std::max(0.1, y)));
            const double wiggle = 0.8 * std::sin(0.37 * k + s) + 0.6 * std::sin(0.011 * k);
            y += dt * (-(y - 1.0) + wiggle);
        }
        pilots.push_back(synthetic_pair(series, dt));
    }
    const CalibrationResult calib = calibrate_centers(pilots, burgers_model(), 2, {0.1, 0.1, 50});
    CHECK(calib.c1_hat > 0.0);
    CHECK(calib.centers.R1 > 0.0);
    CHECK(calib.centers.R1 < calib.centers.R2);
    CHECK(calib.centers.R2 < calib.centers.R3);
    CHECK(calib.centers.Rbar1 < calib.centers.Rbar2);
    CHECK(calib.pilot_excursions >= 50);
}
