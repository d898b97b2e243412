#include "ermakov/reduction.hpp"

#include <cmath>
#include <string>

#include "ermakov/errors.hpp"
#include "ermakov/numerics.hpp"
#include "ermakov/quadrature.hpp"
#include "ermakov/symmetry.hpp"

namespace ermakov {

namespace {

void require_tau(const ExprAst& G) {
    if (G.vars() != std::vector<std::string>{"tau"})
        throw ConfigError("coupling G must be an expression over 'tau' only");
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

} // namespace

ReducedState to_group_coords(const State& s, const RhoSpec& rho, double t0, double tol) {
    const double r = rho.value(s.t);
    if (!(r > 0.0))
        throw DomainError("to_group_coords: rho <= 0 at t = " + std::to_string(s.t));
    const double rd = rho.deriv(s.t);

    ReducedState out;
    out.T = time_map_T(rho, t0, s.t, tol);
    out.u = s.x / r;
    out.v = s.y / r;
    out.uprime = r * s.xdot - rd * s.x;
    out.vprime = r * s.ydot - rd * s.y;
    if (std::abs(out.u) < 1e-300)
        throw SingularError("to_group_coords: u = 0 makes s = v/u singular");
    out.q = out.u * out.v;
    out.s = out.v / out.u;
    out.qprime = out.uprime * out.v + out.u * out.vprime;
    out.sprime = (out.vprime * out.u - out.v * out.uprime) / (out.u * out.u);
    return out;
}

State from_group_coords(const ReducedState& rs, const RhoSpec& rho, double t0, double tol) {
    State s;
    s.t = invert_time_map(rho, t0, rs.T, tol);
    const double r = rho.value(s.t);
    if (!(r > 0.0))
        throw DomainError("from_group_coords: rho <= 0 at t = " + std::to_string(s.t));
    const double rd = rho.deriv(s.t);
    s.x = r * rs.u;
    s.y = r * rs.v;
    s.xdot = rs.uprime / r + rd * rs.u;
    s.ydot = rs.vprime / r + rd * rs.v;
    return s;
}

std::pair<double, double> autonomous_rhs(const ExprAst& G, double u, double v) {
    require_tau(G);
    const double g = eval(G, std::vector<double>{u * v});
    return {-u + u * g, -v + v * g};
}

ScalarSolution q_ode_solve(const ExprAst& G, double I, double J, double q0, double qprime0,
                           const std::vector<double>& T_grid, double q_ref,
                           const IntegratorConfig& cfg, double check_tol) {
    require_tau(G);
    if (T_grid.size() < 2) throw ConfigError("q_ode_solve: T_grid needs at least 2 points");
    if (!(q0 > 0.0)) throw ConfigError("q_ode_solve: q0 must be positive");
    if (!(check_tol > 0.0)) throw ConfigError("q_ode_solve: check_tol must be positive");

    const auto Gint = make_integral_fn("Gq", G, q_ref, 1e-12);
    const auto P = [&](double q) { return 2.0 * I + 4.0 * q * (J - q + Gint->value(q)); };

    const double P0 = P(q0);
    const double mismatch = std::abs(qprime0 * qprime0 - P0);
    if (mismatch > check_tol * std::max(1.0, std::abs(P0)))
        throw ConfigError("q_ode_solve: qprime0^2 = " + std::to_string(qprime0 * qprime0) +
                          " is inconsistent with P(q0) = " + std::to_string(P0));

    const auto accel = [&](double T, double q, double) {
        if (!(q > 0.0))
            throw DomainError("q_ode_solve: q collapsed to zero near T = " + std::to_string(T));
        return 2.0 * J - 4.0 * q + 2.0 * Gint->value(q) +
               2.0 * q * eval(G, std::vector<double>{q});
    };

    auto sol =
        integrate_scalar2(accel, T_grid.front(), q0, qprime0, T_grid.back(), cfg, T_grid);

    for (std::size_t i = 0; i < sol.t.size(); ++i) {
        const double Pi = P(sol.value[i]);
        const double res = std::abs(sol.deriv[i] * sol.deriv[i] - Pi);
        if (res > check_tol * std::max(1.0, std::abs(Pi)))
            throw CheckError("q_ode_solve: first integral q'^2 - P(q) drifted to " +
                             std::to_string(res) + " at T = " + std::to_string(sol.t[i]));
    }
    return sol;
}

ScalarSolution s_from_q(double I, const ScalarSolution& q_sol, double s0, int sign_L) {
    if (!(I >= 0.0)) throw ConfigError("s_from_q: I must be nonnegative");
    if (!(s0 > 0.0)) throw ConfigError("s_from_q: s0 must be positive");
    if (sign_L < -1 || sign_L > 1) throw ConfigError("s_from_q: sign_L must be -1, 0 or +1");
    if (I > 0.0 && sign_L == 0)
        throw ConfigError("s_from_q: sign_L = 0 needs I = 0 (collinear motion)");
    const std::size_t n = q_sol.t.size();
    if (n < 2) throw ConfigError("s_from_q: need at least 2 samples");
    for (double q : q_sol.value)
        if (!(q > 0.0)) throw DomainError("s_from_q: q <= 0 on the grid");

    ScalarSolution out;
    out.t = q_sol.t;
    const double kappa = sign_L * std::sqrt(2.0 * I);
    if (kappa == 0.0) {
        out.value.assign(n, s0);
        out.deriv.assign(n, 0.0);
        out.accel.assign(n, 0.0);
        return out;
    }

    const HermitePath qpath(q_sol.t, q_sol.value, q_sol.deriv);
    QuadratureOptions opt;
    opt.tol = 1e-13;
    double acc = 0.0;
    out.value.reserve(n);
    out.deriv.reserve(n);
    out.accel.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0)
            acc += integrate_adaptive([&](double T) { return 1.0 / qpath.value(T); },
                                      q_sol.t[i - 1], q_sol.t[i], opt);
        const double s = s0 * std::exp(kappa * acc);
        const double sp = kappa * s / q_sol.value[i];
        out.value.push_back(s);
        out.deriv.push_back(sp);
        out.accel.push_back(kappa * s * (kappa - q_sol.deriv[i]) /
                            (q_sol.value[i] * q_sol.value[i]));
    }
    return out;
}

QuadratureSolution solve_by_quadrature(const ExprAst& G, double I, double J,
                                       const ReducedState& r0, const std::vector<double>& T_grid,
                                       double q_ref, const IntegratorConfig& cfg) {
    if (T_grid.empty() || std::abs(T_grid.front() - r0.T) > 1e-9)
        throw ConfigError("solve_by_quadrature: T_grid must start at the initial state's T");

    const double L = r0.u * r0.vprime - r0.v * r0.uprime; // flow-invariant angular momentum
    if (I > 0.0 && L == 0.0)
        throw ConfigError("solve_by_quadrature: I > 0 but the initial angular momentum is 0");

    const auto qs = q_ode_solve(G, I, J, r0.q, r0.qprime, T_grid, q_ref, cfg);
    const auto ss = s_from_q(I, qs, r0.s, sign_of(L));

    QuadratureSolution sol;
    sol.T_grid = qs.t;
    sol.q = qs.value;
    sol.qprime = qs.deriv;
    sol.s = ss.value;
    sol.sprime = ss.deriv;
    sol.I = I;
    sol.J = J;
    sol.qprime_sign.reserve(qs.deriv.size());
    for (double qp : qs.deriv) sol.qprime_sign.push_back(sign_of(qp));
    return sol;
}

Trajectory back_map(const RhoSpec& rho, const QuadratureSolution& sol, int sign_x, int sign_y,
                    double t0, double tol) {
    if ((sign_x != 1 && sign_x != -1) || (sign_y != 1 && sign_y != -1))
        throw ConfigError("back_map: signs must be +1 or -1");
    if (sign_x * sign_y != 1)
        throw ConfigError("back_map: q = x y / rho^2 > 0 forces equal signs for x and y");
    const std::size_t n = sol.T_grid.size();
    if (n == 0 || sol.q.size() != n || sol.s.size() != n || sol.qprime.size() != n ||
        sol.sprime.size() != n)
        throw ConfigError("back_map: inconsistent sample arrays");

    const TimeMap map(rho, t0, tol);
    Trajectory traj;
    traj.system_id = "back_map";
    traj.samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double q = sol.q[i], s = sol.s[i];
        if (!(q > 0.0) || !(s > 0.0))
            throw DomainError("back_map: q and s must stay positive (sample " +
                              std::to_string(i) + ")");
        State st;
        st.t = map.inverse(sol.T_grid[i]);
        const double r = rho.value(st.t);
        const double rd = rho.deriv(st.t);
        const double u = sign_x * std::sqrt(q / s);
        const double v = sign_y * std::sqrt(q * s);
        const double up = u * (sol.qprime[i] / q - sol.sprime[i] / s) / 2.0;
        const double vp = v * (sol.qprime[i] / q + sol.sprime[i] / s) / 2.0;
        st.x = r * u;
        st.y = r * v;
        st.xdot = rd * u + up / r;
        st.ydot = rd * v + vp / r;
        traj.samples.push_back(st);
    }
    return traj;
}

EllipticP elliptic_P_coeffs(double c1, double c2, double c3, double c4, double I, double J,
                            double q_ref) {
    if (c1 != 0.0 && !(q_ref > 0.0))
        throw ConfigError("elliptic_P_coeffs: q_ref must be positive when c1 != 0");

    EllipticP P;
    P.k_ref = c2 * q_ref + c3 * q_ref * q_ref / 2.0 + c4 * q_ref * q_ref * q_ref / 3.0;
    if (c1 != 0.0) P.k_ref -= c1 / q_ref;
    P.a = {2.0 * I - 4.0 * c1, 4.0 * (J - P.k_ref), 4.0 * c2 - 4.0, 2.0 * c3, 4.0 * c4 / 3.0};
    return P;
}

ExprAst elliptic_G(double c1, double c2, double c3, double c4) {
    AstBuilder b({"tau"});
    const auto tau = b.variable("tau");
    bool any = false;
    int root = 0;
    const auto add_term = [&](int term) {
        root = any ? b.add(root, term) : term;
        any = true;
    };
    if (c1 != 0.0) add_term(b.div(b.constant(c1), b.mul(tau, tau)));
    if (c2 != 0.0) add_term(b.constant(c2));
    if (c3 != 0.0) add_term(b.mul(b.constant(c3), tau));
    if (c4 != 0.0) add_term(b.mul(b.constant(c4), b.mul(tau, tau)));
    if (!any) root = b.constant(0.0);
    return b.finish(root);
}

} // namespace ermakov
