#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "levyhedge/errors.hpp"
#include "levyhedge/market_model.hpp"
#include "levyhedge/path_engine.hpp"

using namespace levyhedge;

TEST_SUITE("path_engine") {

TEST_CASE("pure brownian increments pass through unchanged") {
    // sigma * q0(0) = 1 for any pure-Gaussian driver, so dH == dB exactly.
    for (double sigma : {1.0, 2.0}) {
        LevySpec spec;
        spec.sigma = sigma;
        ScenarioSet s = simulate_drivers({spec}, TimeGrid{1.0, 16}, 40, 7);
        REQUIRE(s.layout.total == 1);
        for (int path = 0; path < s.n_paths; ++path)
            for (int step = 0; step < 16; ++step)
                CHECK(s.dh_at(path, step, 0) == s.db_at(path, step, 0));
    }
}

TEST_CASE("compensator shows up with no jumps scheduled") {
    // one atom at x=1 with intensity 3; dt = 1; no events
    LevySpec spec;
    spec.jumps.atoms = {{1.0, 3.0}};
    const TeugelsBasis basis = build_basis(spec);
    const double p1 = basis.pairs[0].p(1.0);  // 1/sqrt(3)

    ScenarioSet s = scenario_from_increments({spec}, TimeGrid{1.0, 1}, 1, {0.0}, {{}});
    CHECK(s.dh_at(0, 0, 0) == doctest::Approx(-3.0 * p1).epsilon(1e-15));
}

TEST_CASE("jump counts add p(x) per event on top of the compensator") {
    LevySpec spec;
    spec.jumps.atoms = {{1.0, 3.0}};
    const TeugelsBasis basis = build_basis(spec);
    const double p1 = basis.pairs[0].p(1.0);

    std::vector<std::vector<JumpEvent>> jumps = {{JumpEvent{0, 0, 0, 2}}};
    ScenarioSet s = scenario_from_increments({spec}, TimeGrid{1.0, 1}, 1, {0.0}, jumps);
    CHECK(s.dh_at(0, 0, 0) == doctest::Approx(2.0 * p1 - 3.0 * p1).epsilon(1e-12));
}

TEST_CASE("mixed driver combines gaussian and jump parts") {
    // sigma = 0.5 plus one atom: order 2; brownian feeds both components
    LevySpec spec = preset_mixed();
    const TeugelsBasis basis = build_basis(spec);
    const double x = spec.jumps.atoms[0].size;
    const double lam = spec.jumps.atoms[0].intensity;
    const TimeGrid grid{1.0, 4};
    const double db = 0.125;

    std::vector<double> brownian(4, 0.0);
    brownian[0] = db;
    ScenarioSet s = scenario_from_increments({spec}, grid, 1, brownian, {{}});
    REQUIRE(s.layout.total == 2);

    for (int k = 1; k <= 2; ++k) {
        const double expected = brownian_coefficient(basis, k) * db -
                                grid.dt() * lam * basis.pairs[k - 1].p(x);
        CHECK(s.dh_at(0, 0, k - 1) == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("simulation is identical for any thread count") {
    std::vector<LevySpec> specs = {preset_brownian(), preset_two_atom()};
    const TimeGrid grid{1.0, 20};
    ScenarioSet serial = simulate_drivers(specs, grid, 500, 99, 1);
    ScenarioSet parallel = simulate_drivers(specs, grid, 500, 99, 5);
    ScenarioSet oversubscribed = simulate_drivers(specs, grid, 500, 99, 64);

    CHECK(serial.brownian == parallel.brownian);
    CHECK(serial.dh == parallel.dh);
    CHECK(serial.brownian == oversubscribed.brownian);
    CHECK(serial.dh == oversubscribed.dh);

    REQUIRE(serial.jump_events.size() == parallel.jump_events.size());
    for (std::size_t j = 0; j < serial.jump_events.size(); ++j) {
        REQUIRE(serial.jump_events[j].size() == parallel.jump_events[j].size());
        for (std::size_t i = 0; i < serial.jump_events[j].size(); ++i) {
            const JumpEvent& a = serial.jump_events[j][i];
            const JumpEvent& b = parallel.jump_events[j][i];
            CHECK(a.path == b.path);
            CHECK(a.step == b.step);
            CHECK(a.atom == b.atom);
            CHECK(a.count == b.count);
        }
    }
}

TEST_CASE("different seeds give different draws") {
    ScenarioSet a = simulate_drivers({preset_brownian()}, TimeGrid{1.0, 5}, 10, 1);
    ScenarioSet b = simulate_drivers({preset_brownian()}, TimeGrid{1.0, 5}, 10, 2);
    CHECK(a.brownian != b.brownian);
}

TEST_CASE("empirical brackets sit near the identity") {
    std::vector<LevySpec> specs = {preset_two_atom()};
    ScenarioSet s = simulate_drivers(specs, TimeGrid{1.0, 50}, 4000, 31);
    REQUIRE(s.layout.total == 2);

    for (int k = 1; k <= 2; ++k)
        for (int k2 = 1; k2 <= 2; ++k2) {
            const BracketEstimate est = empirical_bracket(s, 1, k, 1, k2);
            const double expected = k == k2 ? 1.0 : 0.0;
            CHECK(std::fabs(est.value - expected) <= 5.0 * est.std_error);
        }
}

TEST_CASE("martingale increments have mean near zero") {
    ScenarioSet s = simulate_drivers({preset_mixed()}, TimeGrid{1.0, 40}, 4000, 17);
    for (int c = 0; c < s.layout.total; ++c) {
        double sum = 0.0, sum_sq = 0.0;
        for (int path = 0; path < s.n_paths; ++path) {
            double terminal = 0.0;
            for (int step = 0; step < 40; ++step) terminal += s.dh_at(path, step, c);
            sum += terminal;
            sum_sq += terminal * terminal;
        }
        const double mean = sum / s.n_paths;
        const double se = std::sqrt((sum_sq / s.n_paths - mean * mean) / s.n_paths);
        CHECK(std::fabs(mean) <= 4.0 * se);
    }
}

TEST_CASE("increment dump is one line per component") {
    ScenarioSet s = simulate_drivers({preset_mixed()}, TimeGrid{1.0, 2}, 1, 5);
    std::ostringstream out;
    write_increments_csv(s, out);
    const std::string text = out.str();
    CHECK(text.rfind("path,step,j,k,value\n", 0) == 0);

    int lines = 0;
    for (char ch : text)
        if (ch == '\n') ++lines;
    CHECK(lines == 1 + 2 * 2);  // header + steps x components
    CHECK(text.find("\n0,0,1,1,") != std::string::npos);
    CHECK(text.find("\n0,1,1,2,") != std::string::npos);
}

TEST_CASE("shape and bound violations are config errors") {
    LevySpec spec;
    spec.jumps.atoms = {{1.0, 3.0}};

    try {
        scenario_from_increments({spec}, TimeGrid{1.0, 2}, 1, {0.0}, {{}});
        FAIL("expected config error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config);
        CHECK(e.location() == "brownian");
    }

    std::vector<std::vector<JumpEvent>> bad_step = {{JumpEvent{0, 5, 0, 1}}};
    CHECK_THROWS_AS(
        scenario_from_increments({spec}, TimeGrid{1.0, 2}, 1, {0.0, 0.0}, bad_step), Error);

    std::vector<std::vector<JumpEvent>> bad_atom = {{JumpEvent{0, 0, 3, 1}}};
    CHECK_THROWS_AS(
        scenario_from_increments({spec}, TimeGrid{1.0, 2}, 1, {0.0, 0.0}, bad_atom), Error);

    CHECK_THROWS_AS(simulate_drivers({spec}, TimeGrid{1.0, 2}, 0, 1), Error);
    CHECK_THROWS_AS(simulate_drivers({}, TimeGrid{1.0, 2}, 1, 1), Error);
    CHECK_THROWS_AS(simulate_drivers({spec}, TimeGrid{-1.0, 2}, 1, 1), Error);
}

}  // TEST_SUITE
