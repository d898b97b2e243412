// Quasi-invariance transformation: rescale the planar system by a solution C
// of the time-dependent harmonic oscillator Cdd + w^2(t) C = 0.  In the new
// variables (tbar, xbar, ybar) the explicit time dependence drops out and
// solutions of the omega(t)-only system with sigma-bar = 0 satisfy the
// autonomous pair xbar'' = f(ybar/xbar)/(ybar xbar^2) and its y-counterpart.
// The map is only defined between zeros of C, so paths carry a window and
// remember whether they were truncated at a node.
#pragma once

#include <vector>

#include "ermakov/expr.hpp"
#include "ermakov/numerics.hpp"
#include "ermakov/ode.hpp"
#include "ermakov/state.hpp"

namespace ermakov {

// Transformed sample: tbar is the rescaled time, primes are d/dtbar.
struct QuasiState {
    double tbar = 0.0;
    double xbar = 0.0;
    double ybar = 0.0;
    double xbar_prime = 0.0;
    double ybar_prime = 0.0;
};

// Sampled TDHO solution with cubic Hermite interpolation.  C keeps one sign
// on the whole stored window.  Cdd comes from the equation itself, and the
// rescaled time tbar(t) = integral of C^-2 is precomputed per grid interval
// so queries cost one short quadrature.
class CPath {
  public:
    // omega is the unsquared frequency expression over t; truncated records
    // that a zero crossing cut the window short.
    CPath(ExprAst omega, HermitePath path, bool truncated);

    double value(double t) const { return path_.value(t); }
    double deriv(double t) const { return path_.deriv(t); }
    double accel(double t) const; // -omega^2(t) C(t)

    // tbar relative to t0; both times must lie in the window.
    double tbar(double t0, double t) const;
    // inverse of t -> tbar(t0, t)
    double invert_tbar(double t0, double tbar) const;

    double t_front() const { return path_.t_front(); }
    double t_back() const { return path_.t_back(); }
    const HermitePath& path() const { return path_; }
    const ExprAst& omega() const { return omega_; }
    bool truncated() const { return truncated_; }

  private:
    double tbar_abs(double t) const; // relative to the window start
    ExprAst omega_;
    HermitePath path_;
    std::vector<double> prefix_; // tbar_abs at the grid points
    bool truncated_ = false;
};

// Integrate Cdd = -omega^2(t) C and wrap the result.  The stored window is
// [t0, t_end] cut back to the first zero crossing of C (truncation flagged on
// the result).  omega must be an expression over t alone.
CPath solve_tdho(const ExprAst& omega, double C0, double Cdot0, double t0, double t_end,
                 const IntegratorConfig& cfg);

// xbar = x/C, ybar = y/C, tbar = integral_{t0}^{t} C^-2, primes by the chain
// rule d/dtbar = C^2 d/dt.
QuasiState quasi_transform(const CPath& cpath, const State& s, double t0);
State quasi_inverse(const CPath& cpath, const QuasiState& qs, double t0);

// Max deviation of a transformed trajectory from the autonomous pair, with
// second derivatives re-fitted from the sampled first derivatives (centred
// five-point stencils; the outermost two samples on each side only feed the
// stencils).  Needs at least seven samples ordered by tbar.
double sl2_residual(const ExprAst& f, const ExprAst& g, const std::vector<QuasiState>& traj);

} // namespace ermakov
