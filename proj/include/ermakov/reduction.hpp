// Solution by quadrature for the coupled oscillator pair: canonical group
// coordinates (u, v, T), the quadrature variables q = uv and s = v/u, the
// one-dimensional q equation with its first integral q'^2 = P(q), the s
// quadrature, and the algebraic map back to (x, y).  For elliptic-family
// couplings P(q) is an explicit quartic polynomial.
#pragma once

#include <array>
#include <utility>
#include <vector>

#include "ermakov/expr.hpp"
#include "ermakov/ode.hpp"
#include "ermakov/state.hpp"
#include "ermakov/systems.hpp"

namespace ermakov {

// State in group coordinates: u = x/rho, v = y/rho, T = integral of rho^-2,
// primes are T-derivatives, q = u v, s = v/u.
struct ReducedState {
    double T = 0.0;
    double u = 0.0, v = 0.0;
    double uprime = 0.0, vprime = 0.0;
    double q = 0.0, s = 0.0;
    double qprime = 0.0, sprime = 0.0;
};

// Sampled (q, s)(T) together with the invariants that generated them and the
// sign history of q'.
struct QuadratureSolution {
    std::vector<double> T_grid;
    std::vector<double> q, qprime;
    std::vector<double> s, sprime;
    double I = 0.0;
    double J = 0.0;
    std::vector<int> qprime_sign;
};

// u = x/rho, v = y/rho, T = time_map_T(rho, t0, s.t); u' = rho xdot -
// rhodot x and likewise v' (the T-derivative absorbs one factor rho^2).
// Requires u != 0 for the ratio s = v/u.
ReducedState to_group_coords(const State& s, const RhoSpec& rho, double t0, double tol = 1e-12);

// Inverse of to_group_coords: t from the inverse time map, x = rho u,
// xdot = (uprime + rhodot rho u)/rho.
State from_group_coords(const ReducedState& rs, const RhoSpec& rho, double t0,
                        double tol = 1e-12);

// The autonomous pair u'' = -u + u G(uv), v'' = -v + v G(uv).
std::pair<double, double> autonomous_rhs(const ExprAst& G, double u, double v);

// Integrates q'' = 2J - 4q + 2*integral(G, q_ref..q) + 2q G(q) on T_grid,
// the T-derivative of the first integral q'^2 = P(q) := 2I + 4q(J - q +
// integral(G, q_ref..q)).  The second-order form passes turning points
// (q' = 0) smoothly; the first-order relation is monitored instead:
// construction rejects inconsistent (I, J, q0, qprime0) and the returned
// samples are checked to satisfy |q'^2 - P(q)| <= check_tol (CheckError).
// q must stay positive; collapse raises DomainError.
ScalarSolution q_ode_solve(const ExprAst& G, double I, double J, double q0, double qprime0,
                           const std::vector<double>& T_grid, double q_ref,
                           const IntegratorConfig& cfg = {}, double check_tol = 1e-8);

// s(T) = s0 exp(sign_L sqrt(2I) * integral of 1/q), sampled on q_sol's grid.
// sign_L is the sign of the angular momentum x ydot - y xdot (equivalently
// u v' - v u'); it selects the orientation since the printed relation
// q s'/s = sqrt(2I) only covers the positive one.  I = 0 gives s constant.
ScalarSolution s_from_q(double I, const ScalarSolution& q_sol, double s0, int sign_L);

// q_ode_solve + s_from_q from the initial reduced state, packaged.
QuadratureSolution solve_by_quadrature(const ExprAst& G, double I, double J,
                                       const ReducedState& r0, const std::vector<double>& T_grid,
                                       double q_ref, const IntegratorConfig& cfg = {});

// x = sign_x rho sqrt(q/s), y = sign_y rho sqrt(q s), t from the inverse
// time map; velocities by the chain rule through u' = u (q'/q - s'/s)/2 and
// v' = v (q'/q + s'/s)/2.  Since q > 0 throughout, x and y never cross zero
// and the initial signs apply globally; their product must be +1 (q = x y /
// rho^2 > 0).
Trajectory back_map(const RhoSpec& rho, const QuadratureSolution& sol, int sign_x, int sign_y,
                    double t0, double tol = 1e-12);

// P(q) = a[0] + a[1] q + a[2] q^2 + a[3] q^3 + a[4] q^4.
struct EllipticP {
    std::array<double, 5> a{};
    double k_ref = 0.0; // antiderivative of G at q_ref, absorbed into a[1]
    double eval(double q) const {
        return a[0] + q * (a[1] + q * (a[2] + q * (a[3] + q * a[4])));
    }
};

// For G(tau) = c1/tau^2 + c2 + c3 tau + c4 tau^2 the first integral P is the
// quartic {2I - 4 c1, 4(J - k_ref), 4 c2 - 4, 2 c3, 4 c4 / 3} with k_ref =
// -c1/q_ref + c2 q_ref + c3 q_ref^2/2 + c4 q_ref^3/3.  q_ref > 0 is required
// when c1 != 0.
EllipticP elliptic_P_coeffs(double c1, double c2, double c3, double c4, double I, double J,
                            double q_ref);

// The coupling itself as an expression over tau; zero coefficients are
// omitted so the c1 = 0 family stays regular at tau = 0.
ExprAst elliptic_G(double c1, double c2, double c3, double c4);

} // namespace ermakov
