// The planar system family: a pair xdd + Omega^2 x = F(y/x)/(y x^2),
// ydd + Omega^2 y = 0, where Omega^2 may depend on t, the coordinates and the
// velocities.  Frequencies of the shape Omega^2 = -rhodd/rho + sigma(...)/rho^4
// (sigma over the four scale invariants) are the ones whose flow maps
// solutions to solutions; the traditional omega^2(t) - g(x/y)/(x y^3) form and
// the nonlinearly coupled oscillator pair are special cases, composed here.
#pragma once

#include <memory>
#include <variant>

#include "ermakov/expr.hpp"
#include "ermakov/ode.hpp"
#include "ermakov/pinney.hpp"
#include "ermakov/state.hpp"

namespace ermakov {

// Scale factor rho(t) > 0: either a closed-form expression over t with AD
// derivatives, or a sampled auxiliary-equation solution with its window.
// Copies share the underlying data.
class RhoSpec {
  public:
    explicit RhoSpec(ExprAst rho); // over t
    explicit RhoSpec(RhoPath path);

    double value(double t) const;
    double deriv(double t) const;
    double deriv2(double t) const;

    bool is_path() const;
    const RhoPath* path() const; // nullptr for the expression form

    // Positivity probe at evenly spaced sample points; throws DomainError.
    void check_positive(double t_lo, double t_hi, std::size_t samples = 65) const;

    // Handles for embedding rho and its derivatives into composed ASTs.
    // "rho" checks positivity at evaluation time; all three differentiate as
    // far as the stored data allows.
    std::shared_ptr<const ExternalFn> fn() const;        // rho(t)
    std::shared_ptr<const ExternalFn> deriv_fn() const;  // rhodot(t)
    std::shared_ptr<const ExternalFn> deriv2_fn() const; // rhoddot(t)

  private:
    std::shared_ptr<const std::variant<ExprAst, RhoPath>> impl_;
};

// System definition.  F is over r (meaning y/x); Omega2 may be declared over
// any subset of (t, x, y, xdot, ydot) and is lifted to the full list.
// F equal to the literal constant 0 turns the coupling term off entirely.
struct GeneralizedErmakov {
    GeneralizedErmakov(ExprAst F_, ExprAst Omega2_);

    ExprAst F;
    ExprAst Omega2;
    bool F_is_zero = false;
};

// sigma is over (a1, a2, b1, b2) = (x/rho, y/rho, rho xd - rhod x,
// rho yd - rhod y), the combinations invariant under the flow.
struct SymmetricFrequency {
    SymmetricFrequency(RhoSpec rho_, ExprAst sigma_);

    RhoSpec rho;
    ExprAst sigma;
};

// Coupled oscillator pair: xdd + Omega^2 x = 0 and its y-twin with
// Omega^2 = omega^2(t) - G(x y / rho^2)/rho^4, rho solving the auxiliary
// equation for the same omega.  Construction verifies that consistency on
// [t_lo, t_hi] and keeps the squared frequency.
class RayReidSpec {
  public:
    static RayReidSpec from_omega(const ExprAst& omega, ExprAst G, RhoSpec rho, double t_lo,
                                  double t_hi, double tol = 1e-8);
    static RayReidSpec from_omega2(ExprAst omega2, ExprAst G, RhoSpec rho, double t_lo,
                                   double t_hi, double tol = 1e-8);

    const ExprAst& omega2() const { return omega2_; } // over t
    const ExprAst& G() const { return G_; }           // over tau
    const RhoSpec& rho() const { return rho_; }

  private:
    RayReidSpec(ExprAst omega2, ExprAst G, RhoSpec rho);

    ExprAst omega2_;
    ExprAst G_;
    RhoSpec rho_;
};

// Equations of motion.  The coupling term needs x != 0 and y != 0; states
// within 1e-300 of either axis are rejected instead of overflowing.  With
// F identically zero the term (and its guards) disappear.
Accel rhs_generalized(const GeneralizedErmakov& sys, const State& s);

// rhs_generalized wrapped for the integrator.
PlanarAccel planar_accel(const GeneralizedErmakov& sys);

// Omega^2 = omega^2(t) - g(x/y)/(x y^3), over (t, x, y).  omega is the
// unsquared frequency over t; g is over rinv (meaning x/y).
ExprAst omega2_traditional(const ExprAst& omega, const ExprAst& g);

// Omega^2 = -rhodd/rho + sigma(a1, a2, b1, b2)/rho^4, over the full state.
ExprAst omega2_symmetric(const SymmetricFrequency& sf);

// Combine the two coupling shapes of the traditional pair into one F:
// F(r) = f(r) - g(1/r)/r^2.  The sign makes rhs_generalized with
// omega2_traditional(omega, g) reproduce the traditional right-hand sides
// exactly; see the reconstruction property test.
ExprAst F_from_fg(const ExprAst& f, const ExprAst& g);

// Squared frequency omega^2(t) = Omega0^2/rho^4 - rhodd/rho for which rho
// solves the auxiliary equation with constant Omega0 on the right.
ExprAst omega_from_rho(const RhoSpec& rho, double Omega0);

// The coupled pair's frequency as a single Omega^2 AST over (t, x, y).
ExprAst rayreid_omega2(const RayReidSpec& spec);

// x ydd - y xdd + F(y/x)/x^2: zero along exact solutions regardless of the
// frequency, since Omega^2 cancels between the two equations.
double equivalent_residual(const ExprAst& F, const State& s, double xddot, double yddot);

} // namespace ermakov
