// First integrals of the planar family and drift reports along trajectories.
// I is conserved for every frequency expression; J is conserved for the
// coupled oscillator pair; H is the (generally non-conserved) Hamiltonian of
// that pair; K is its image in group coordinates and coincides with J.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ermakov/expr.hpp"
#include "ermakov/ode.hpp"
#include "ermakov/state.hpp"
#include "ermakov/systems.hpp"

namespace ermakov {

// Per-sample values of one quantity along a trajectory.  Drifts are measured
// against the first sample; the relative drift falls back to the absolute one
// when |values[0]| <= 1e-14.
struct InvariantReport {
    std::string name;
    std::vector<double> values;
    double max_abs_drift = 0.0;
    double max_rel_drift = 0.0;
};

// I = (x ydot - y xdot)^2 / 2 + integral of F over [r_ref, y/x].  F is over
// r.  Shifting r_ref shifts I by a constant, so drift reports do not depend
// on it; absolute values do.  Requires x != 0.
double ermakov_lewis_I(const ExprAst& F, const State& s, double r_ref, double tol = 1e-12);

// J = (rho xdot - rhodot x)(rho ydot - rhodot y) + x y / rho^2
//     - integral of G over [q_ref, x y / rho^2].
// rho and its derivative are taken from the spec at s.t.
double rayreid_J(const RayReidSpec& spec, const State& s, double q_ref, double tol = 1e-12);

// H = px py + omega^2 x y - rho^-2 * (integral of G over [q_ref, x y / rho^2])
// with the cross momenta px = ydot, py = xdot.
double hamiltonian_H(const RayReidSpec& spec, const State& s, double q_ref, double tol = 1e-12);

// H at frozen time t as an expression over (x, y, px, py).  The coupling
// integral enters through a cumulative-integral handle, so derivative() gives
// exact gradients: dH/dpx = py, dH/dpy = px, -dH/dx = pxdot, -dH/dy = pydot.
ExprAst hamiltonian_ast(const RayReidSpec& spec, double t, double q_ref, double tol = 1e-12);

// K = pu pv + u v - integral of G over [q_ref, u v], the group-coordinate
// image of J under u = x/rho, v = y/rho, pu = v', pv = u'.
double reduced_K(double u, double v, double pu, double pv, const ExprAst& G, double q_ref,
                 double tol = 1e-12);

using InvariantEvaluator = std::function<double(const State&)>;

// Evaluates `invariant` at every sample.  Evaluator failures are rethrown
// with the sample index.  Needs at least 2 samples.
InvariantReport drift_report(const Trajectory& traj, const std::string& name,
                             const InvariantEvaluator& invariant);

} // namespace ermakov
