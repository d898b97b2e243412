// Finite form of the one-parameter group rho^2 d_t + rho rhodot (x d_x + y d_y):
// the rescaled time T with its inverse, the flow on states, a check that the
// flow maps sampled solutions to solutions, and an admissibility test for
// frequency expressions based on the orbit-invariance of
// sigma* = rho^4 (Omega^2 + rhodd/rho).
#pragma once

#include <memory>
#include <vector>

#include "ermakov/expr.hpp"
#include "ermakov/ode.hpp"
#include "ermakov/state.hpp"
#include "ermakov/systems.hpp"

namespace ermakov {

struct GroupParams {
    RhoSpec rho;
    double t0 = 0.0;  // reference time: T(t0) = 0
    double eps = 0.0; // group parameter
};

// T = integral of rho^-2 from t0 to t, adaptive to tol.  Strictly increasing
// in t; throws DomainError when rho <= 0 is sampled.
double time_map_T(const RhoSpec& rho, double t0, double t, double tol = 1e-12);

// The t with time_map_T(rho, t0, t) = T, to |residual| <= tol.  For a sampled
// rho the root is bracketed inside its window; for an expression the bracket
// expands from t0 (horizon 1e6).  Throws RootFindError when T is unattainable.
double invert_time_map(const RhoSpec& rho, double t0, double T, double tol = 1e-12);

// Cached T map for repeated queries against one (rho, t0) pair.  Forward
// values are served from an anchored cumulative integral, so a long sweep of
// queries costs one quadrature pass.
class TimeMap {
  public:
    TimeMap(RhoSpec rho, double t0, double tol = 1e-12);

    double forward(double t) const;  // T(t)
    double inverse(double T) const;  // t with T(t) = T

    const RhoSpec& rho() const { return rho_; }
    double t0() const { return t0_; }

  private:
    RhoSpec rho_;
    double t0_;
    double tol_;
    std::shared_ptr<const ExternalFn> T_;
};

// Finite flow by gp.eps: T(tnew) = T(t) + eps, xnew = x rho(tnew)/rho(t),
// velocities keep b1 = rho xdot - rhodot x (and b2 likewise).  Exactly the
// identity at eps = 0.  The TimeMap overload reuses a cached map.
State apply_flow(const GroupParams& gp, const State& s);
State apply_flow(const TimeMap& map, double eps, const State& s);

// Transforms every sample of traj by the flow, differentiates the transformed
// velocities on the transformed time grid, and returns the max acceleration
// residual against the equations of motion.  Only samples whose shifted T
// stays within the trajectory's own window are usable (the flow maps the rest
// outside the sampled data); needs at least 7 usable samples.  The edge
// points of the difference stencils are excluded from the max.
double solution_map_residual(const GeneralizedErmakov& sys, const Trajectory& traj,
                             const GroupParams& gp);

struct SymmetryVerdict {
    bool symmetric = false;
    double max_deviation = 0.0; // relative to max(1, |sigma*(s)|)
    State worst_state;          // untransformed sample realizing the max
    double worst_eps = 0.0;
};

// Tests whether Omega2 (over any subset of t, x, y, xdot, ydot) belongs to
// the family -rhodd/rho + sigma(...)/rho^4 for the given rho: equivalent to
// sigma* = rho^4 (Omega^2 + rhodd/rho) being constant along group orbits.
// Evaluates sigma* at every sample state and its flow images for every eps.
SymmetryVerdict is_symmetric_frequency(const ExprAst& Omega2, const RhoSpec& rho,
                                       const std::vector<State>& sample_states,
                                       const std::vector<double>& eps_list, double tol);

} // namespace ermakov
