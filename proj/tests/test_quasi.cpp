#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ermakov/errors.hpp"
#include "ermakov/quasi.hpp"

using namespace ermakov;

namespace {

ExprAst omega_expr(const std::string& text) { return parse_expression(text, {"t"}); }

IntegratorConfig tight() {
    IntegratorConfig cfg;
    cfg.rtol = 1e-11;
    cfg.atol = 1e-13;
    return cfg;
}

} // namespace

TEST_CASE("zero frequency gives the identity transformation") {
    const CPath cp = solve_tdho(omega_expr("0"), 1.0, 0.0, 0.0, 5.0, tight());
    CHECK(!cp.truncated());
    CHECK(cp.value(3.1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cp.deriv(3.1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cp.accel(3.1) == doctest::Approx(0.0));

    // C == 1 makes tbar plain elapsed time and leaves states untouched
    CHECK(cp.tbar(0.5, 4.5) == doctest::Approx(4.0).epsilon(1e-12));
    State s;
    s.t = 2.0;
    s.x = 1.3;
    s.y = -0.7;
    s.xdot = 0.25;
    s.ydot = 1.5;
    const QuasiState q = quasi_transform(cp, s, 0.5);
    CHECK(q.tbar == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(q.xbar == doctest::Approx(s.x));
    CHECK(q.ybar == doctest::Approx(s.y));
    CHECK(q.xbar_prime == doctest::Approx(s.xdot));
    CHECK(q.ybar_prime == doctest::Approx(s.ydot));
}

TEST_CASE("unit frequency: C = cos t and tbar = tan t") {
    const double t0 = -1.4;
    const CPath cp = solve_tdho(omega_expr("1"), std::cos(t0), -std::sin(t0), t0, 1.4, tight());
    CHECK(!cp.truncated()); // cos keeps one sign on (-pi/2, pi/2)
    // value interp error is h^4 |C''''|/384 ~ 1e-11 at 128 samples/unit; the
    // interpolant's derivative is only h^3 |C''''|/(72 sqrt 3) ~ 4e-9
    for (double t : {-1.3, -0.4, 0.0, 0.9, 1.35}) {
        CHECK(cp.value(t) == doctest::Approx(std::cos(t)).epsilon(1e-10));
        CHECK(cp.deriv(t) == doctest::Approx(-std::sin(t)).epsilon(1e-8));
    }
    for (double t : {-1.35, -0.7, 0.3, 1.2, 1.39})
        CHECK(cp.tbar(0.0, t) == doctest::Approx(std::tan(t)).epsilon(1e-9));
}

TEST_CASE("solve_tdho equation residual stays near the integration tolerance") {
    const ExprAst w = omega_expr("1 + 0.3*sin(t)");
    const IntegratorConfig cfg = tight();
    const CPath cp = solve_tdho(w, 0.8, 0.4, 0.0, 2.0, cfg);
    // compare against an independent re-integration at much tighter tolerance
    IntegratorConfig ref = cfg;
    ref.rtol = 1e-13;
    ref.atol = 1e-15;
    const CPath cr = solve_tdho(w, 0.8, 0.4, 0.0, 2.0, ref);
    const double tmax = std::min(cp.t_back(), cr.t_back()) - 1e-9;
    double worst = 0.0;
    for (double t = 0.0; t <= tmax; t += 0.05)
        worst = std::max(worst, std::fabs(cp.value(t) - cr.value(t)));
    CHECK(worst <= 10.0 * cfg.rtol * 10.0);
}

TEST_CASE("co-moving state maps to the constant solution") {
    const double t0 = -1.4;
    const CPath cp = solve_tdho(omega_expr("1"), std::cos(t0), -std::sin(t0), t0, 1.4, tight());
    State s;
    s.t = 0.8;
    s.x = std::cos(0.8); // x follows C itself
    s.xdot = -std::sin(0.8);
    s.y = 2.0 * std::cos(0.8);
    s.ydot = -2.0 * std::sin(0.8);
    const QuasiState q = quasi_transform(cp, s, 0.0);
    // bounded by the TDHO solver's global error, not the transform itself
    CHECK(q.xbar == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::fabs(q.xbar_prime) <= 1e-8);
    CHECK(q.ybar == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(std::fabs(q.ybar_prime) <= 1e-8);
}

TEST_CASE("transform then inverse returns the original state") {
    const CPath cp = solve_tdho(omega_expr("1 + 0.2*cos(2*t)"), 1.0, -0.3, 0.0, 1.2, tight());
    std::mt19937 rng(20260815u);
    std::uniform_real_distribution<double> ut(cp.t_front() + 0.01, cp.t_back() - 0.01);
    std::uniform_real_distribution<double> uv(-2.0, 2.0);
    for (int k = 0; k < 40; ++k) {
        State s;
        s.t = ut(rng);
        s.x = uv(rng);
        s.y = uv(rng);
        s.xdot = uv(rng);
        s.ydot = uv(rng);
        const double t0 = cp.t_front() + 0.02;
        const State back = quasi_inverse(cp, quasi_transform(cp, s, t0), t0);
        CHECK(std::fabs(back.t - s.t) <= 1e-10 * std::max(1.0, std::fabs(s.t)));
        CHECK(std::fabs(back.x - s.x) <= 1e-10 * std::max(1.0, std::fabs(s.x)));
        CHECK(std::fabs(back.y - s.y) <= 1e-10 * std::max(1.0, std::fabs(s.y)));
        CHECK(std::fabs(back.xdot - s.xdot) <= 1e-10 * std::max(1.0, std::fabs(s.xdot)));
        CHECK(std::fabs(back.ydot - s.ydot) <= 1e-10 * std::max(1.0, std::fabs(s.ydot)));
    }
}

TEST_CASE("tbar is strictly increasing inside the window") {
    const double t0 = -1.4;
    const CPath cp = solve_tdho(omega_expr("1"), std::cos(t0), -std::sin(t0), t0, 1.4, tight());
    double prev = cp.tbar(-1.39, -1.39);
    for (double t = -1.35; t <= 1.39; t += 0.07) {
        const double cur = cp.tbar(-1.39, t);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("a node inside the requested window truncates it with a flag") {
    // cos t crosses zero at pi/2, well inside [0, 4]
    const CPath cp = solve_tdho(omega_expr("1"), 1.0, 0.0, 0.0, 4.0, tight());
    CHECK(cp.truncated());
    CHECK(cp.t_back() < 3.14159 / 2.0 + 1e-6);
    CHECK(cp.value(cp.t_back()) > 0.0);
    // queries past the kept window refuse instead of extrapolating
    CHECK_THROWS_AS((void)cp.tbar(0.0, 2.0), DomainError);
    QuasiState q;
    q.tbar = cp.tbar(0.0, cp.t_back()) + 50.0;
    CHECK_THROWS_AS((void)quasi_inverse(cp, q, 0.0), RootFindError);
}

TEST_CASE("construction rejects bad inputs") {
    CHECK_THROWS_AS((void)solve_tdho(omega_expr("1"), 0.0, 0.0, 0.0, 1.0, tight()), ConfigError);
    CHECK_THROWS_AS((void)solve_tdho(omega_expr("1"), 1.0, 0.0, 1.0, 1.0, tight()), ConfigError);
    // frequency must not depend on the dynamical variables
    const ExprAst bad = parse_expression("t + x", {"t", "x"});
    CHECK_THROWS_AS((void)solve_tdho(bad, 1.0, 0.0, 0.0, 1.0, tight()), ConfigError);
}

TEST_CASE("straight lines in a zero-frequency system have vanishing sl2 residual") {
    const CPath cp = solve_tdho(omega_expr("0"), 1.0, 0.0, 0.0, 2.0, tight());
    const ExprAst f = parse_expression("0", {"r"});
    const ExprAst g = parse_expression("0", {"r"});
    // with omega = 0 and f = g = 0 straight lines solve the system exactly
    std::vector<QuasiState> traj;
    for (int i = 0; i <= 99; ++i) {
        const double t = 0.02 * i;
        State s;
        s.t = t;
        s.x = 1.0 + 0.5 * t;
        s.xdot = 0.5;
        s.y = 2.0 - 0.25 * t;
        s.ydot = -0.25;
        traj.push_back(quasi_transform(cp, s, 0.0));
    }
    CHECK(sl2_residual(f, g, traj) <= 1e-9);
}

TEST_CASE("SHO solutions become straight lines after the transformation") {
    // x'' + x = 0 with C = cos t: xbar(tbar) is linear, so the f = g = 0
    // autonomous form holds along the transformed curve
    const double tw = -1.3;
    const CPath cp = solve_tdho(omega_expr("1"), std::cos(tw), -std::sin(tw), tw, 1.3, tight());
    const ExprAst f = parse_expression("0", {"r"});
    // xbar' is constant along these curves, so the stencils see only solver
    // noise; coarse sampling keeps the 1/h amplification small
    std::vector<QuasiState> traj;
    for (double t = -1.25; t <= 1.25 + 1e-12; t += 0.05) {
        State s;
        s.t = t;
        s.x = 2.0 * std::cos(t) + 0.3 * std::sin(t);
        s.xdot = -2.0 * std::sin(t) + 0.3 * std::cos(t);
        s.y = 1.0 * std::cos(t) - 0.8 * std::sin(t);
        s.ydot = -1.0 * std::sin(t) - 0.8 * std::cos(t);
        traj.push_back(quasi_transform(cp, s, 0.0));
    }
    CHECK(sl2_residual(f, f, traj) <= 1e-6);
}

TEST_CASE("coordinate-dependent frequency leaves a visible residual") {
    // negative control: x'' + (1 + x^2/4) x = 0 is NOT removed by the cos-t
    // rescaling, so the transformed curve misses the autonomous form
    const double tw = -1.0;
    const CPath cp = solve_tdho(omega_expr("1"), std::cos(tw), -std::sin(tw), tw, 1.0, tight());
    const ExprAst f = parse_expression("0", {"r"});
    std::vector<QuasiState> traj;
    double x = 1.0, xd = 0.0, y = 0.5, yd = 0.4;
    const double h = 0.002;
    auto acc = [](double u) { return -(1.0 + 0.25 * u * u) * u; };
    std::vector<State> states;
    for (double t = -0.9; t <= 0.9 + 1e-12; t += h) {
        State s;
        s.t = t;
        s.x = x;
        s.xdot = xd;
        s.y = y;
        s.ydot = yd;
        states.push_back(s);
        // leapfrog is plenty for a negative control
        const double ax = acc(x), ay = acc(y);
        x += h * xd + 0.5 * h * h * ax;
        y += h * yd + 0.5 * h * h * ay;
        xd += 0.5 * h * (ax + acc(x));
        yd += 0.5 * h * (ay + acc(y));
    }
    for (std::size_t i = 0; i < states.size(); i += 5)
        traj.push_back(quasi_transform(cp, states[i], 0.0));
    CHECK(sl2_residual(f, f, traj) > 1e-2);
}

TEST_CASE("sl2_residual input validation") {
    const ExprAst f = parse_expression("0", {"r"});
    std::vector<QuasiState> tiny(4);
    CHECK_THROWS_AS((void)sl2_residual(f, f, tiny), Error);
    std::vector<QuasiState> onaxis(9);
    for (std::size_t i = 0; i < onaxis.size(); ++i) {
        onaxis[i].tbar = static_cast<double>(i);
        onaxis[i].xbar = 1.0;
        onaxis[i].ybar = 0.0; // sits on the axis
    }
    CHECK_THROWS_AS((void)sl2_residual(f, f, onaxis), SingularError);
}
