#include "ermakov/invariants.hpp"

#include <cmath>
#include <cstddef>
#include <utility>

#include "ermakov/errors.hpp"

namespace ermakov {

namespace {

constexpr double kAxisGuard = 1e-300;

void require_single_var(const ExprAst& ast, const char* var, const char* what) {
    const std::vector<std::string> expected{var};
    if (ast.vars() != expected)
        throw ConfigError(std::string(what) + " must be an expression over '" + var + "' only");
}

} // namespace

double ermakov_lewis_I(const ExprAst& F, const State& s, double r_ref, double tol) {
    require_single_var(F, "r", "coupling F");
    if (std::abs(s.x) < kAxisGuard)
        throw SingularError("ermakov_lewis_I: x = 0 makes the ratio y/x singular");
    const double L = s.x * s.ydot - s.y * s.xdot;
    double value = 0.5 * L * L;
    if (!F.is_constant_zero()) value += integral(F, "r", r_ref, s.y / s.x, {0.0}, tol);
    return value;
}

double rayreid_J(const RayReidSpec& spec, const State& s, double q_ref, double tol) {
    const double rho = spec.rho().value(s.t);
    const double rhodot = spec.rho().deriv(s.t);
    const double b1 = rho * s.xdot - rhodot * s.x;
    const double b2 = rho * s.ydot - rhodot * s.y;
    const double q = s.x * s.y / (rho * rho);
    double value = b1 * b2 + q;
    if (!spec.G().is_constant_zero()) value -= integral(spec.G(), "tau", q_ref, q, {0.0}, tol);
    return value;
}

double hamiltonian_H(const RayReidSpec& spec, const State& s, double q_ref, double tol) {
    const double w2 = eval(spec.omega2(), std::vector<double>{s.t});
    const double rho = spec.rho().value(s.t);
    const double q = s.x * s.y / (rho * rho);
    const double px = s.ydot;
    const double py = s.xdot;
    double value = px * py + w2 * s.x * s.y;
    if (!spec.G().is_constant_zero())
        value -= integral(spec.G(), "tau", q_ref, q, {0.0}, tol) / (rho * rho);
    return value;
}

ExprAst hamiltonian_ast(const RayReidSpec& spec, double t, double q_ref, double tol) {
    const double w2 = eval(spec.omega2(), std::vector<double>{t});
    const double rho = spec.rho().value(t);
    const double inv_rho2 = 1.0 / (rho * rho);

    AstBuilder b({"x", "y", "px", "py"});
    const auto x = b.variable("x");
    const auto y = b.variable("y");
    const auto px = b.variable("px");
    const auto py = b.variable("py");

    auto root = b.add(b.mul(px, py), b.mul(b.constant(w2), b.mul(x, y)));
    if (!spec.G().is_constant_zero()) {
        const auto gint = make_integral_fn("Gint", spec.G(), q_ref, tol);
        const auto q = b.mul(b.constant(inv_rho2), b.mul(x, y));
        root = b.sub(root, b.mul(b.constant(inv_rho2), b.external(gint, q)));
    }
    return b.finish(root);
}

double reduced_K(double u, double v, double pu, double pv, const ExprAst& G, double q_ref,
                 double tol) {
    require_single_var(G, "tau", "coupling G");
    double value = pu * pv + u * v;
    if (!G.is_constant_zero()) value -= integral(G, "tau", q_ref, u * v, {0.0}, tol);
    return value;
}

InvariantReport drift_report(const Trajectory& traj, const std::string& name,
                             const InvariantEvaluator& invariant) {
    if (traj.samples.size() < 2) throw ConfigError("drift_report: need at least 2 samples");

    InvariantReport rep;
    rep.name = name;
    rep.values.reserve(traj.samples.size());
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        try {
            rep.values.push_back(invariant(traj.samples[i]));
        } catch (const Error& e) {
            throw Error("invariant '" + name + "' failed at sample " + std::to_string(i) +
                        " (t = " + std::to_string(traj.samples[i].t) + "): " + e.what());
        }
    }

    const double v0 = rep.values.front();
    for (const double v : rep.values)
        rep.max_abs_drift = std::max(rep.max_abs_drift, std::abs(v - v0));
    rep.max_rel_drift =
        std::abs(v0) > 1e-14 ? rep.max_abs_drift / std::abs(v0) : rep.max_abs_drift;
    return rep;
}

} // namespace ermakov
