// The auxiliary equation rhodd + w^2(t) rho = rho^-3 and the classical way to
// assemble its solutions from two independent TDHO solutions u, v:
// rho = sqrt(A u^2 + 2B uv + C v^2) with AC - B^2 = 1/W^2, W the Wronskian.
#pragma once

#include <vector>

#include "ermakov/expr.hpp"
#include "ermakov/numerics.hpp"
#include "ermakov/ode.hpp"
#include "ermakov/quasi.hpp"

namespace ermakov {

// Positive sampled solution of the auxiliary equation with cubic Hermite
// interpolation.  The second derivative is reconstructed from the equation,
// rho^-3 - omega^2 rho, so it is exact on the grid and smooth off it.
class RhoPath {
  public:
    // omega is the unsquared frequency over t; values must be positive.
    RhoPath(ExprAst omega, HermitePath path);

    double value(double t) const { return path_.value(t); }
    double deriv(double t) const { return path_.deriv(t); }
    double deriv2(double t) const;

    double t_front() const { return path_.t_front(); }
    double t_back() const { return path_.t_back(); }
    const HermitePath& path() const { return path_; }
    const ExprAst& omega() const { return omega_; }

  private:
    ExprAst omega_;
    HermitePath path_;
};

// Integrate the auxiliary equation from rho(t0) = rho0 > 0.  A state that
// collapses toward zero is reported as an integration failure with the time
// it happened (real solutions keep a positive floor; reaching it means the
// numerics broke down).
RhoPath solve_pinney(const ExprAst& omega, double rho0, double rhodot0, double t0, double t_end,
                     const IntegratorConfig& cfg);

// Combine two independent TDHO solutions for the same frequency into a
// solution of the auxiliary equation.  Requires matching grids, a constant
// nonzero Wronskian, AC - B^2 = 1/W^2 within 1e-10 and a positive radicand.
RhoPath pinney_superposition(const CPath& u, const CPath& v, double A, double B, double C);

// Diagnostic: equation residual rhodd + w^2 rho - rho^-3 at the grid points,
// with rhodd re-estimated by five-point differentiation of the stored rhodot
// samples.  The stencils amplify the interpolation jitter of the rhodot
// samples by ~1/h, so for solver-produced paths at default density the
// readout has a floor around 1e-6; genuine non-solutions sit orders of
// magnitude above it.
std::vector<double> pinney_residuals(const RhoPath& rho);

} // namespace ermakov
