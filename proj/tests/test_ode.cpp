#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ermakov/errors.hpp"
#include "ermakov/numerics.hpp"
#include "ermakov/ode.hpp"

using namespace ermakov;

namespace {

const PlanarAccel kSho = [](const State& s) { return Accel{-s.x, -s.y}; };
const State kShoStart{0.0, 1.0, 0.0, 0.0, 1.0}; // x = cos t, y = sin t

} // namespace

TEST_CASE("adaptive integration tracks the harmonic oscillator") {
    IntegratorConfig cfg;
    cfg.rtol = 1e-10;
    cfg.atol = 1e-12;
    const auto grid = linspace(0.0, 10.0, 257);
    const Trajectory traj = integrate(kSho, kShoStart, 10.0, cfg, grid, "sho");
    REQUIRE(traj.samples.size() == grid.size());
    CHECK(traj.system_id == "sho");
    CHECK(traj.stats.accepted > 10);
    for (const State& s : traj.samples) {
        CHECK(std::fabs(s.x - std::cos(s.t)) <= 1e-8);
        CHECK(std::fabs(s.y - std::sin(s.t)) <= 1e-8);
        CHECK(std::fabs(s.xdot + std::sin(s.t)) <= 1e-8);
        CHECK(std::fabs(s.ydot - std::cos(s.t)) <= 1e-8);
    }
    CHECK(traj.samples.front().t == 0.0);
    CHECK(traj.samples.back().t == 10.0);
    CHECK(traj.samples.front().x == 1.0); // the t0 sample is the initial state
}

TEST_CASE("energy drift over one hundred periods stays tiny") {
    IntegratorConfig cfg;
    cfg.rtol = 1e-10;
    cfg.atol = 1e-12;
    const double t_end = 200.0 * M_PI;
    const Trajectory traj = integrate(kSho, kShoStart, t_end, cfg, {t_end});
    REQUIRE(traj.samples.size() == 1);
    const State& s = traj.samples.back();
    const double e0 = 1.0; // (xdot^2 + x^2 + ydot^2 + y^2) / 2 at the start
    const double e1 = 0.5 * (s.xdot * s.xdot + s.x * s.x + s.ydot * s.ydot + s.y * s.y);
    CHECK(std::fabs(e1 - e0) / e0 <= 1e-7);
}

TEST_CASE("dense output is as accurate as the steps themselves") {
    IntegratorConfig cfg;
    cfg.rtol = 1e-10;
    cfg.atol = 1e-12;
    const auto grid = linspace(0.0, 10.0, 4001); // far denser than the step sequence
    const Trajectory traj = integrate(kSho, kShoStart, 10.0, cfg, grid);
    double worst = 0.0;
    for (const State& s : traj.samples)
        worst = std::max(worst, std::fabs(s.x - std::cos(s.t)));
    CHECK(worst <= 1e-8);
}

TEST_CASE("fixed-step RK4 converges at fourth order") {
    IntegratorConfig cfg;
    cfg.method = IntegratorConfig::Method::RK4;
    const auto err_at = [&](double h) {
        cfg.h_init = h;
        const Trajectory traj = integrate(kSho, kShoStart, 1.0, cfg, {1.0});
        return std::fabs(traj.samples.back().x - std::cos(1.0));
    };
    const double e1 = err_at(0.02), e2 = err_at(0.01);
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.10));
}

TEST_CASE("RK4 snaps the step to divide the span") {
    IntegratorConfig cfg;
    cfg.method = IntegratorConfig::Method::RK4;
    cfg.h_init = 0.3; // 1.0 / 0.3 is not an integer; expect 3 steps of 1/3
    const Trajectory traj = integrate(kSho, kShoStart, 1.0, cfg, {1.0});
    CHECK(traj.stats.accepted == 3);
    CHECK(traj.samples.back().t == 1.0);
}

TEST_CASE("scalar second-order equation with sampled accelerations") {
    IntegratorConfig cfg;
    cfg.rtol = 1e-11;
    cfg.atol = 1e-13;
    const auto grid = linspace(0.0, 6.0, 101);
    const ScalarSolution sol = integrate_scalar2(
        [](double, double c, double) { return -c; }, 0.0, 1.0, 0.0, 6.0, cfg, grid);
    REQUIRE(sol.t.size() == grid.size());
    for (std::size_t i = 0; i < sol.t.size(); ++i) {
        CHECK(std::fabs(sol.value[i] - std::cos(sol.t[i])) <= 1e-9);
        CHECK(std::fabs(sol.deriv[i] + std::sin(sol.t[i])) <= 1e-9);
        CHECK(sol.accel[i] == -sol.value[i]);
    }
}

TEST_CASE("grid and configuration validation") {
    IntegratorConfig cfg;
    CHECK_THROWS_AS(integrate(kSho, kShoStart, -1.0, cfg, {}), Error);
    CHECK_THROWS_AS(integrate(kSho, kShoStart, 1.0, cfg, {0.5, 0.5}), Error);
    CHECK_THROWS_AS(integrate(kSho, kShoStart, 1.0, cfg, {0.5, 0.2}), Error);
    CHECK_THROWS_AS(integrate(kSho, kShoStart, 1.0, cfg, {1.5}), Error);
    CHECK_THROWS_AS(integrate(kSho, kShoStart, 1.0, cfg, {-0.5}), Error);
    IntegratorConfig bad;
    bad.rtol = -1.0;
    CHECK_THROWS_AS(integrate(kSho, kShoStart, 1.0, bad, {}), Error);
    bad = IntegratorConfig{};
    bad.h_min = 1.0;
    bad.h_init = 0.1;
    CHECK_THROWS_AS(integrate(kSho, kShoStart, 1.0, bad, {}), Error);
    State nan_start = kShoStart;
    nan_start.x = NAN;
    CHECK_THROWS_AS(integrate(kSho, nan_start, 1.0, cfg, {}), Error);
}

TEST_CASE("failure modes carry the time reached") {
    IntegratorConfig cfg;
    cfg.max_steps = 500;
    CHECK_THROWS_AS(integrate(kSho, kShoStart, 1e6, cfg, {}), IntegrationError);

    // forcing term with a pole at t = 1: expect step underflow close to it
    IntegratorConfig fine;
    fine.h_min = 1e-12;
    const PlanarAccel pole = [](const State& s) {
        return Accel{1.0 / (1.0 - s.t), 0.0};
    };
    try {
        integrate(pole, kShoStart, 2.0, fine, {});
        FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
        CHECK(e.t == doctest::Approx(1.0).epsilon(0.05));
    }

    // exceptions thrown by the acceleration callback propagate unchanged
    const PlanarAccel throws = [](const State& s) -> Accel {
        if (s.t > 0.5) throw SingularError("hit the wall");
        return Accel{0.0, 0.0};
    };
    CHECK_THROWS_AS(integrate(throws, kShoStart, 1.0, IntegratorConfig{}, {}), SingularError);
}

TEST_CASE("zero-length integration returns only the initial sample") {
    IntegratorConfig cfg;
    const Trajectory traj = integrate(kSho, kShoStart, 0.0, cfg, {0.0});
    REQUIRE(traj.samples.size() == 1);
    CHECK(traj.samples.front().x == 1.0);
    CHECK(traj.stats.accepted == 0);
}
