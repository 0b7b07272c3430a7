#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "synclaw/config.hpp"

using namespace synclaw;

TEST_CASE("parse, serialize, parse is the identity") {
    const std::string text =
        "schema_version = 1\n"
        "experiment = synchro\n"
        "seeds = 1,2,3\n"
        "grid.L = 1.0\n"
        "grid.n_cells = 64\n"
        "model.name = burgers\n"
        "noise.modes = 1:0.5\n"
        "noise.psi0.time = one\n"
        "noise.psi0.index = 1\n"
        "noise.psi0.amplitude = 1.0\n"
        "solver.dt = 0.002\n"
        "solver.t_final = 5.0\n"
        "ic.u0 = sine:1:1.0\n"
        "ic.v0 = zero\n";
    const ExperimentConfig cfg = parse_config(text);
    CHECK(cfg.experiment == "synchro");
    CHECK(cfg.seeds.size() == 3);
    CHECK(cfg.noise_modes.size() == 1);
    CHECK(cfg.noise_modes[0].amplitude == doctest::Approx(0.5));
    const ExperimentConfig again = parse_config(serialize_config(cfg));
    CHECK(again == cfg);
    CHECK(config_hash(again) == config_hash(cfg));
}

TEST_CASE("comments, blank lines, defaults") {
    const std::string text =
        "# comment line\n"
        "experiment = oracle   # trailing comment\n"
        "\n"
        "model.name = zero\n";
    const ExperimentConfig cfg = parse_config(text);
    CHECK(cfg.experiment == "oracle");
    CHECK(cfg.output_dir == "out_oracle");
    CHECK(cfg.schema_version == 1);
}

TEST_CASE("line-anchored parse errors") {
    SUBCASE("unknown key") {
        try {
            parse_config("experiment = oracle\nbogus.key = 3\n");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.line == 2);
            CHECK(std::string(e.what()).find("bogus.key") != std::string::npos);
        }
    }
    SUBCASE("bad number") {
        try {
            parse_config("experiment = oracle\ngrid.L = abc\n");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.line == 2);
        }
    }
    SUBCASE("duplicate key") {
        CHECK_THROWS_AS(parse_config("experiment = oracle\nexperiment = synchro\n"), ConfigError);
    }
    SUBCASE("missing separator") {
        CHECK_THROWS_AS(parse_config("experiment oracle\n"), ConfigError);
    }
}

TEST_CASE("semantic validation names the violated invariant") {
    SUBCASE("radii ordering") {
        const std::string text =
            "experiment = excursions\n"
            "model.name = burgers\n"
            "exc.radii = 1.0:2.0:4.0:3.0:2.5\n";  // Rbar1 > Rbar2
        try {
            parse_config(text);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("Rbar1 < Rbar2") != std::string::npos);
            CHECK(e.line == 3);
        }
    }
    SUBCASE("supersolution needs a coercive model") {
        const std::string text =
            "experiment = supersolution\n"
            "model.name = zero\n";
        try {
            parse_config(text);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("coercive") != std::string::npos);
        }
    }
    SUBCASE("unknown experiment") {
        CHECK_THROWS_AS(parse_config("experiment = what\n"), ConfigError);
    }
    SUBCASE("cfl range") {
        CHECK_THROWS_AS(parse_config("experiment = oracle\nsolver.cfl_safety = 1.5\n"),
                        ConfigError);
    }
    SUBCASE("odd norm index") {
        CHECK_THROWS_AS(parse_config("experiment = oracle\nsolver.norm_p = 3\n"), ConfigError);
    }
}

TEST_CASE("hash changes with any field") {
    ExperimentConfig a;
    a.experiment = "oracle";
    a.output_dir = "out_oracle";
    ExperimentConfig b = a;
    b.seeds = {2};
    CHECK(config_hash(a) != config_hash(b));
    ExperimentConfig c = a;
    c.solver_dt = 2e-3;
    CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("model and initial condition factories") {
    ExperimentConfig cfg;
    cfg.model_name = "coercive_quadratic";
    cfg.model_alpha = 2.0;
    cfg.model_beta = 1.0;
    const FluxModel m = model_from_config(cfg);
    CHECK(m.dflux(1.0) == doctest::Approx(2.0));

    const Grid g = build_grid(1.0, 16);
    IcSpec sine;
    sine.kind = "sine";
    sine.index = 1;
    sine.amplitude = 2.0;
    const Field f = initial_condition(g, sine, 1);
    CHECK(lp_norm(f, kPInf) <= 2.0 + 1e-12);
    IcSpec rnd;
    rnd.kind = "random";
    rnd.amplitude = 5.0;
    const Field r1 = initial_condition(g, rnd, 9);
    const Field r2 = initial_condition(g, rnd, 9);
    CHECK(r1.values == r2.values);
    CHECK(lp_norm(r1, kPInf) == doctest::Approx(5.0));
}
