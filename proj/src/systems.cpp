#include "ermakov/systems.hpp"

#include <cmath>
#include <sstream>

#include "ermakov/errors.hpp"
#include "ermakov/numerics.hpp"

namespace ermakov {

namespace {

constexpr double kAxisGuard = 1e-300;

const std::vector<std::string>& state_vars() {
    static const std::vector<std::string> v{"t", "x", "y", "xdot", "ydot"};
    return v;
}

void require_vars(const ExprAst& ast, const std::vector<std::string>& expected,
                  const char* what) {
    if (ast.vars() != expected) {
        std::ostringstream msg;
        msg << what << " must be an expression over (";
        for (std::size_t i = 0; i < expected.size(); ++i)
            msg << (i ? ", " : "") << expected[i];
        msg << ")";
        throw ConfigError(msg.str());
    }
}

// Re-declare src over `target`, mapping each of its variables by name.
ExprAst lift_to(const ExprAst& src, const std::vector<std::string>& target, const char* what) {
    AstBuilder b(target);
    std::vector<int> map;
    map.reserve(src.vars().size());
    for (const std::string& v : src.vars()) {
        bool found = false;
        for (const std::string& t : target)
            if (t == v) {
                map.push_back(b.variable(v));
                found = true;
                break;
            }
        if (!found)
            throw ConfigError(std::string(what) + " uses variable '" + v +
                              "' outside the allowed list");
    }
    return b.finish(b.splice(src, map));
}

using RhoData = std::variant<ExprAst, RhoPath>;

double rho_eval(const RhoData& data, double t, int order) {
    if (const ExprAst* ast = std::get_if<ExprAst>(&data)) {
        if (order == 0) return eval(*ast, std::vector<double>{t});
        return derivative(*ast, "t", std::vector<double>{t}, order);
    }
    const RhoPath& path = std::get<RhoPath>(data);
    if (order == 0) return path.value(t);
    if (order == 1) return path.deriv(t);
    return path.deriv2(t);
}

// External-node adapter: exposes rho and its derivatives, shifting orders so
// AD through composed ASTs stays consistent with the stored data.
class RhoSpecFn final : public ExternalFn {
  public:
    RhoSpecFn(std::shared_ptr<const RhoData> data, int base_order)
        : data_(std::move(data)), base_(base_order) {}

    std::string name() const override {
        return base_ == 0 ? "rho" : (base_ == 1 ? "rhodot" : "rhoddot");
    }
    double value(double t) const override {
        const double v = rho_eval(*data_, t, base_);
        if (base_ == 0 && !(v > 0.0)) {
            std::ostringstream msg;
            msg << "rho is not positive at t = " << t;
            throw DomainError(msg.str());
        }
        return v;
    }
    double deriv1(double t) const override {
        if (base_ >= 2) return ExternalFn::deriv1(t); // third derivative unavailable
        return rho_eval(*data_, t, base_ + 1);
    }
    double deriv2(double t) const override {
        if (base_ >= 1) return ExternalFn::deriv2(t);
        return rho_eval(*data_, t, 2);
    }

  private:
    std::shared_ptr<const RhoData> data_;
    int base_;
};

} // namespace

RhoSpec::RhoSpec(ExprAst rho) {
    require_vars(rho, {"t"}, "rho");
    impl_ = std::make_shared<const RhoData>(std::move(rho));
}

RhoSpec::RhoSpec(RhoPath path) { impl_ = std::make_shared<const RhoData>(std::move(path)); }

double RhoSpec::value(double t) const { return rho_eval(*impl_, t, 0); }
double RhoSpec::deriv(double t) const { return rho_eval(*impl_, t, 1); }
double RhoSpec::deriv2(double t) const { return rho_eval(*impl_, t, 2); }

bool RhoSpec::is_path() const { return std::holds_alternative<RhoPath>(*impl_); }

const RhoPath* RhoSpec::path() const { return std::get_if<RhoPath>(impl_.get()); }

void RhoSpec::check_positive(double t_lo, double t_hi, std::size_t samples) const {
    if (!(t_hi >= t_lo)) throw ConfigError("positivity window is reversed");
    const auto pts = t_hi > t_lo ? linspace(t_lo, t_hi, std::max<std::size_t>(samples, 2))
                                 : std::vector<double>{t_lo};
    for (double t : pts)
        if (!(value(t) > 0.0)) {
            std::ostringstream msg;
            msg << "rho is not positive at t = " << t;
            throw DomainError(msg.str());
        }
}

std::shared_ptr<const ExternalFn> RhoSpec::fn() const {
    return std::make_shared<RhoSpecFn>(impl_, 0);
}
std::shared_ptr<const ExternalFn> RhoSpec::deriv_fn() const {
    return std::make_shared<RhoSpecFn>(impl_, 1);
}
std::shared_ptr<const ExternalFn> RhoSpec::deriv2_fn() const {
    return std::make_shared<RhoSpecFn>(impl_, 2);
}

GeneralizedErmakov::GeneralizedErmakov(ExprAst F_, ExprAst Omega2_) : F(std::move(F_)) {
    require_vars(F, {"r"}, "F");
    Omega2 = Omega2_.vars() == state_vars() ? std::move(Omega2_)
                                            : lift_to(Omega2_, state_vars(), "Omega2");
    F_is_zero = F.is_constant_zero();
}

SymmetricFrequency::SymmetricFrequency(RhoSpec rho_, ExprAst sigma_)
    : rho(std::move(rho_)), sigma(std::move(sigma_)) {
    require_vars(sigma, {"a1", "a2", "b1", "b2"}, "sigma");
}

RayReidSpec::RayReidSpec(ExprAst omega2, ExprAst G, RhoSpec rho)
    : omega2_(std::move(omega2)), G_(std::move(G)), rho_(std::move(rho)) {}

RayReidSpec RayReidSpec::from_omega(const ExprAst& omega, ExprAst G, RhoSpec rho, double t_lo,
                                    double t_hi, double tol) {
    require_vars(omega, {"t"}, "omega");
    AstBuilder b({"t"});
    const int t_ = b.variable("t");
    const int w = b.splice(omega, {t_});
    return from_omega2(b.finish(b.mul(w, w)), std::move(G), std::move(rho), t_lo, t_hi, tol);
}

RayReidSpec RayReidSpec::from_omega2(ExprAst omega2, ExprAst G, RhoSpec rho, double t_lo,
                                     double t_hi, double tol) {
    require_vars(omega2, {"t"}, "omega2");
    require_vars(G, {"tau"}, "G");
    if (!(t_hi > t_lo)) throw ConfigError("verification window must have positive length");
    if (!(tol > 0.0)) throw ConfigError("verification tolerance must be positive");
    if (const RhoPath* p = rho.path())
        if (t_lo < p->t_front() || t_hi > p->t_back())
            throw ConfigError("verification window extends beyond the sampled rho");
    rho.check_positive(t_lo, t_hi);

    // rho must solve the auxiliary equation for this omega on the window
    for (double t : linspace(t_lo, t_hi, 65)) {
        const double r = rho.value(t);
        const double w2 = eval(omega2, std::vector<double>{t});
        const double lhs = rho.deriv2(t) + w2 * r;
        const double rhs = 1.0 / (r * r * r);
        const double scale = std::max({1.0, std::fabs(w2 * r), std::fabs(rhs)});
        if (std::fabs(lhs - rhs) > tol * scale) {
            std::ostringstream msg;
            msg << "rho does not solve the auxiliary equation at t = " << t
                << " (residual " << lhs - rhs << ")";
            throw ConfigError(msg.str());
        }
    }
    return RayReidSpec(std::move(omega2), std::move(G), std::move(rho));
}

Accel rhs_generalized(const GeneralizedErmakov& sys, const State& s) {
    const double w2 = eval(sys.Omega2, std::vector<double>{s.t, s.x, s.y, s.xdot, s.ydot});
    Accel a;
    a.ax = -w2 * s.x;
    a.ay = -w2 * s.y;
    if (!sys.F_is_zero) {
        if (std::fabs(s.x) < kAxisGuard)
            throw SingularError("x is too close to zero for the coupling term");
        if (std::fabs(s.y) < kAxisGuard)
            throw SingularError("y is too close to zero for the coupling term");
        a.ax += eval(sys.F, std::vector<double>{s.y / s.x}) / (s.y * s.x * s.x);
    }
    return a;
}

PlanarAccel planar_accel(const GeneralizedErmakov& sys) {
    return [sys](const State& s) { return rhs_generalized(sys, s); };
}

ExprAst omega2_traditional(const ExprAst& omega, const ExprAst& g) {
    require_vars(omega, {"t"}, "omega");
    require_vars(g, {"rinv"}, "g");
    AstBuilder b({"t", "x", "y"});
    const int t_ = b.variable("t");
    const int x_ = b.variable("x");
    const int y_ = b.variable("y");
    const int w = b.splice(omega, {t_});
    const int gv = b.splice(g, {b.div(x_, y_)});
    const int y3 = b.mul(b.mul(y_, y_), y_);
    return b.finish(b.sub(b.mul(w, w), b.div(gv, b.mul(x_, y3))));
}

ExprAst omega2_symmetric(const SymmetricFrequency& sf) {
    AstBuilder b(state_vars());
    const int t_ = b.variable("t");
    const int x_ = b.variable("x");
    const int y_ = b.variable("y");
    const int xd_ = b.variable("xdot");
    const int yd_ = b.variable("ydot");
    const int rho = b.external(sf.rho.fn(), t_);
    const int rhod = b.external(sf.rho.deriv_fn(), t_);
    const int rhodd = b.external(sf.rho.deriv2_fn(), t_);
    const int a1 = b.div(x_, rho);
    const int a2 = b.div(y_, rho);
    const int b1 = b.sub(b.mul(rho, xd_), b.mul(rhod, x_));
    const int b2 = b.sub(b.mul(rho, yd_), b.mul(rhod, y_));
    const int sig = b.splice(sf.sigma, {a1, a2, b1, b2});
    const int rho2 = b.mul(rho, rho);
    const int rho4 = b.mul(rho2, rho2);
    return b.finish(b.add(b.neg(b.div(rhodd, rho)), b.div(sig, rho4)));
}

ExprAst F_from_fg(const ExprAst& f, const ExprAst& g) {
    require_vars(f, {"r"}, "f");
    require_vars(g, {"rinv"}, "g");
    AstBuilder b({"r"});
    const int r_ = b.variable("r");
    const int fv = b.splice(f, {r_});
    const int gv = b.splice(g, {b.div(b.constant(1.0), r_)});
    return b.finish(b.sub(fv, b.div(gv, b.mul(r_, r_))));
}

ExprAst omega_from_rho(const RhoSpec& rho, double Omega0) {
    AstBuilder b({"t"});
    const int t_ = b.variable("t");
    const int r = b.external(rho.fn(), t_);
    const int rdd = b.external(rho.deriv2_fn(), t_);
    const int r2 = b.mul(r, r);
    const int r4 = b.mul(r2, r2);
    return b.finish(b.sub(b.div(b.constant(Omega0 * Omega0), r4), b.div(rdd, r)));
}

ExprAst rayreid_omega2(const RayReidSpec& spec) {
    AstBuilder b({"t", "x", "y"});
    const int t_ = b.variable("t");
    const int x_ = b.variable("x");
    const int y_ = b.variable("y");
    const int w2 = b.splice(spec.omega2(), {t_});
    const int rho = b.external(spec.rho().fn(), t_);
    const int rho2 = b.mul(rho, rho);
    const int rho4 = b.mul(rho2, rho2);
    const int gv = b.splice(spec.G(), {b.div(b.mul(x_, y_), rho2)});
    return b.finish(b.sub(w2, b.div(gv, rho4)));
}

double equivalent_residual(const ExprAst& F, const State& s, double xddot, double yddot) {
    require_vars(F, {"r"}, "F");
    if (std::fabs(s.x) < kAxisGuard)
        throw SingularError("x is too close to zero for the equivalent form");
    return s.x * yddot - s.y * xddot +
           eval(F, std::vector<double>{s.y / s.x}) / (s.x * s.x);
}

} // namespace ermakov
