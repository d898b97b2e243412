#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ermakov/dual.hpp"
#include "ermakov/errors.hpp"
#include "ermakov/numerics.hpp"
#include "ermakov/quadrature.hpp"
#include "ermakov/roots.hpp"

using namespace ermakov;

TEST_CASE("finite-difference weights reproduce known stencils") {
    // centred 3-point first derivative on a uniform grid
    const auto w1 = fd_weights({-1.0, 0.0, 1.0}, 0.0, 1);
    CHECK(w1[0] == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(w1[1] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(w1[2] == doctest::Approx(0.5).epsilon(1e-14));
    // centred second derivative
    const auto w2 = fd_weights({-1.0, 0.0, 1.0}, 0.0, 2);
    CHECK(w2[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(w2[1] == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(w2[2] == doctest::Approx(1.0).epsilon(1e-14));
    // weights are exact on polynomials up to the stencil order, any nodes
    const std::vector<double> x{0.0, 0.13, 0.31, 0.42, 0.77};
    const auto w = fd_weights(x, 0.31, 1);
    double acc = 0.0; // d/dt of t^4 at 0.31 is 4*0.31^3
    for (std::size_t j = 0; j < x.size(); ++j) acc += w[j] * std::pow(x[j], 4);
    CHECK(acc == doctest::Approx(4.0 * std::pow(0.31, 3)).epsilon(1e-11));
}

TEST_CASE("five-point derivative of sampled data") {
    const auto t = linspace(0.0, 2.0, 41);
    std::vector<double> f(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) f[i] = std::sin(3.0 * t[i]);
    const auto df = fd_derivative_5pt(t, f);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double exact = 3.0 * std::cos(3.0 * t[i]);
        // h^4 |f^(5)| with constant 1/30 centred, 1/5 one-sided at the edges
        const double bound = (i < 2 || i + 2 >= t.size()) ? 4e-4 : 6e-5;
        CHECK(std::fabs(df[i] - exact) <= bound);
    }
    CHECK_THROWS_AS(fd_derivative_5pt({0, 1, 2}, {0, 1, 2}), Error);
}

TEST_CASE("Hermite paths interpolate to fourth order") {
    const auto t = linspace(0.0, 3.0, 61);
    std::vector<double> v(t.size()), d(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        v[i] = std::exp(-t[i]) * std::sin(2 * t[i]);
        d[i] = std::exp(-t[i]) * (2 * std::cos(2 * t[i]) - std::sin(2 * t[i]));
    }
    HermitePath path(t, v, d);
    std::mt19937 rng(3u);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const double q = u(rng);
        const double exact = std::exp(-q) * std::sin(2 * q);
        const double dexact = std::exp(-q) * (2 * std::cos(2 * q) - std::sin(2 * q));
        // cubic Hermite: |err| <= h^4/384 max|f''''| ~ 4e-7 here (h = 0.05)
        CHECK(std::fabs(path.value(q) - exact) <= 5e-7);
        CHECK(std::fabs(path.deriv(q) - dexact) <= 5e-5);
    }
    CHECK(path.value(0.0) == v.front());
    CHECK(path.value(3.0) == v.back());
    CHECK_THROWS_AS(path.value(-0.001), Error);
    CHECK_THROWS_AS(path.value(3.001), Error);

    path.truncate_after(1.51);
    CHECK(path.t_back() == doctest::Approx(1.5).epsilon(1e-14));
    CHECK_THROWS_AS(path.value(1.6), Error);

    CHECK_THROWS_AS(HermitePath({0.0, 0.0, 1.0}, {0, 0, 0}, {0, 0, 0}), Error);
    CHECK_THROWS_AS(HermitePath({0.0, 1.0}, {0, 0, 0}, {0, 0}), Error);
}

TEST_CASE("linspace hits both endpoints exactly") {
    const auto g = linspace(-1.0, 2.0, 7);
    CHECK(g.size() == 7);
    CHECK(g.front() == -1.0);
    CHECK(g.back() == 2.0);
    for (std::size_t i = 1; i < g.size(); ++i)
        CHECK(g[i] - g[i - 1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("adaptive quadrature on smooth, peaked and oscillatory integrands") {
    QuadratureOptions opt;
    opt.tol = 1e-11;
    CHECK(integrate_adaptive([](double x) { return std::sin(x); }, 0.0, M_PI, opt) ==
          doctest::Approx(2.0).epsilon(1e-11));
    CHECK(integrate_adaptive([](double x) { return std::exp(-x * x); }, -8.0, 8.0, opt) ==
          doctest::Approx(std::sqrt(M_PI)).epsilon(1e-11));
    // a sharp peak
    CHECK(integrate_adaptive([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0, opt) ==
          doctest::Approx(2.0 / 1e-2 * std::atan(1.0 / 1e-2)).epsilon(1e-9));
    // oscillatory
    CHECK(integrate_adaptive([](double x) { return std::cos(40.0 * x); }, 0.0, 3.0, opt) ==
          doctest::Approx(std::sin(120.0) / 40.0).epsilon(1e-9));
    // orientation and degenerate interval
    CHECK(integrate_adaptive([](double x) { return x; }, 2.0, 0.0, opt) ==
          doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(integrate_adaptive([](double x) { return x; }, 2.0, 2.0, opt) == 0.0);
}

TEST_CASE("quadrature splits are additive within twice the tolerance") {
    const auto f = [](double x) { return std::sin(7.0 * x) * std::exp(0.3 * x); };
    QuadratureOptions opt;
    opt.tol = 1e-10;
    std::mt19937 rng(5u);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int i = 0; i < 25; ++i) {
        double a = u(rng), b = u(rng), c = u(rng);
        const double whole = integrate_adaptive(f, a, b, opt);
        const double parts = integrate_adaptive(f, a, c, opt) + integrate_adaptive(f, c, b, opt);
        CHECK(std::fabs(whole - parts) <= 2.0 * opt.tol);
    }
}

TEST_CASE("quadrature propagates integrand exceptions and enforces budgets") {
    CHECK_THROWS_AS(integrate_adaptive(
                        [](double x) {
                            if (x > 0.5) throw DomainError("boom");
                            return x;
                        },
                        0.0, 1.0),
                    DomainError);
    QuadratureOptions tiny;
    tiny.tol = 1e-15;
    tiny.max_evals = 200;
    CHECK_THROWS_AS(
        integrate_adaptive([](double x) { return 1.0 / (1e-8 + x * x); }, -1.0, 1.0, tiny),
        QuadratureError);
}

TEST_CASE("bracketed root finding") {
    const auto f = [](double x) { return std::cos(x) - x; };
    const double r = find_root_bracketed(f, 0.0, 1.0);
    CHECK(std::fabs(f(r)) <= 1e-12);
    // exact root at an endpoint
    CHECK(find_root_bracketed([](double x) { return x - 2.0; }, 2.0, 5.0) == 2.0);
    CHECK_THROWS_AS(find_root_bracketed([](double x) { return x * x + 1.0; }, -1.0, 1.0),
                    RootFindError);
}

TEST_CASE("monotone inversion walks out a bracket then refines") {
    const auto F = [](double x) { return std::atan(x); };
    const double x = invert_increasing(F, 1.2, 0.0, 100.0);
    CHECK(x == doctest::Approx(std::tan(1.2)).epsilon(1e-10));
    const double xn = invert_increasing(F, -0.9, 0.0, 100.0);
    CHECK(xn == doctest::Approx(std::tan(-0.9)).epsilon(1e-10));
    // target beyond the attainable range
    CHECK_THROWS_AS(invert_increasing(F, 2.0, 0.0, 1e6), RootFindError);
}

TEST_CASE("dual numbers carry first and second derivatives") {
    // f(x) = x^2 sin(x): f' = 2x sin + x^2 cos, f'' = (2 - x^2) sin + 4x cos
    const double x = 1.3;
    const Dual2 d = [&] {
        const Dual2 xx{x, 1.0, 1.0, 0.0};
        return xx * xx * sin(xx);
    }();
    CHECK(d.v == doctest::Approx(x * x * std::sin(x)).epsilon(1e-15));
    CHECK(d.d1 == doctest::Approx(2 * x * std::sin(x) + x * x * std::cos(x)).epsilon(1e-14));
    CHECK(d.d12 ==
          doctest::Approx((2 - x * x) * std::sin(x) + 4 * x * std::cos(x)).epsilon(1e-14));

    // pow edge cases: x^2 at 0 has f'' = 2; x^1 at 0 has f' = 1, f'' = 0
    const Dual2 zero{0.0, 1.0, 1.0, 0.0};
    const Dual2 sq = pow(zero, Dual2{2.0});
    CHECK(sq.v == 0.0);
    CHECK(sq.d1 == 0.0);
    CHECK(sq.d12 == 2.0);
    const Dual2 lin = pow(zero, Dual2{1.0});
    CHECK(lin.d1 == 1.0);
    CHECK(lin.d12 == 0.0);
    CHECK_THROWS_AS(pow(zero, Dual2{-1.0}), DomainError);
    CHECK_THROWS_AS(pow(Dual2{-2.0, 1, 1, 0}, Dual2{0.5}), DomainError);
    CHECK(pow(Dual2{5.0, 1, 1, 0}, Dual2{0.0}).v == 1.0);
}
