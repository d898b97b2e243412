#include "ermakov/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ermakov/errors.hpp"
#include "ermakov/numerics.hpp"
#include "ermakov/quadrature.hpp"
#include "ermakov/roots.hpp"

namespace ermakov {

namespace {

constexpr double kExprHorizon = 1e6; // bracket-search span for expression rho

double inv_rho_sq(const RhoSpec& rho, double tau) {
    const double r = rho.value(tau);
    if (!(r > 0.0))
        throw DomainError("time map: rho <= 0 at t = " + std::to_string(tau));
    return 1.0 / (r * r);
}

// sigma* = rho^4 (Omega^2 + rhodd/rho); Omega2 may use any subset of the
// state variables, bound here by name.
double sigma_star(const ExprAst& Omega2, const RhoSpec& rho, const State& s) {
    std::vector<double> at;
    at.reserve(Omega2.vars().size());
    for (const auto& v : Omega2.vars()) {
        if (v == "t") at.push_back(s.t);
        else if (v == "x") at.push_back(s.x);
        else if (v == "y") at.push_back(s.y);
        else if (v == "xdot") at.push_back(s.xdot);
        else if (v == "ydot") at.push_back(s.ydot);
        else throw ConfigError("frequency expression uses unknown variable '" + v + "'");
    }
    const double r = rho.value(s.t);
    const double w2 = eval(Omega2, at);
    return r * r * r * r * (w2 + rho.deriv2(s.t) / r);
}

} // namespace

double time_map_T(const RhoSpec& rho, double t0, double t, double tol) {
    QuadratureOptions opt;
    opt.tol = tol;
    return integrate_adaptive([&](double tau) { return inv_rho_sq(rho, tau); }, t0, t, opt);
}

double invert_time_map(const RhoSpec& rho, double t0, double T, double tol) {
    RootOptions opt;
    opt.tol_f = tol;
    const auto F = [&](double t) { return time_map_T(rho, t0, t, tol * 0.1); };

    if (const RhoPath* p = rho.path()) {
        const double lo = p->t_front();
        const double hi = p->t_back();
        const double Tlo = F(lo);
        const double Thi = F(hi);
        if (T < Tlo - tol || T > Thi + tol)
            throw RootFindError("invert_time_map: target outside the attainable range of the "
                                "sampled window");
        const double target = std::clamp(T, Tlo, Thi);
        return find_root_bracketed([&](double t) { return F(t) - target; }, lo, hi, opt);
    }
    return invert_increasing(F, T, t0, kExprHorizon, opt);
}

TimeMap::TimeMap(RhoSpec rho, double t0, double tol)
    : rho_(std::move(rho)), t0_(t0), tol_(tol) {
    AstBuilder b({"t"});
    const auto integrand = b.finish(b.div(b.constant(1.0), b.mul(b.external(rho_.fn(), b.variable("t")),
                                                                 b.external(rho_.fn(), b.variable("t")))));
    T_ = make_integral_fn("T", integrand, t0_, tol_);
}

double TimeMap::forward(double t) const { return T_->value(t); }

double TimeMap::inverse(double T) const {
    RootOptions opt;
    opt.tol_f = tol_;
    const auto F = [&](double t) { return T_->value(t); };

    if (const RhoPath* p = rho_.path()) {
        const double lo = p->t_front();
        const double hi = p->t_back();
        const double Tlo = F(lo);
        const double Thi = F(hi);
        if (T < Tlo - tol_ || T > Thi + tol_)
            throw RootFindError("time map inverse: target outside the attainable range of the "
                                "sampled window");
        const double target = std::clamp(T, Tlo, Thi);
        return find_root_bracketed([&](double t) { return F(t) - target; }, lo, hi, opt);
    }
    return invert_increasing(F, T, t0_, kExprHorizon, opt);
}

State apply_flow(const TimeMap& map, double eps, const State& s) {
    if (eps == 0.0) return s;

    const double tnew = map.inverse(map.forward(s.t) + eps);
    const RhoSpec& rho = map.rho();
    const double r = rho.value(s.t);
    const double rd = rho.deriv(s.t);
    const double rn = rho.value(tnew);
    const double rnd = rho.deriv(tnew);
    if (!(r > 0.0) || !(rn > 0.0))
        throw DomainError("apply_flow: rho <= 0 along the orbit");

    State out;
    out.t = tnew;
    out.x = s.x * rn / r;
    out.y = s.y * rn / r;
    const double b1 = r * s.xdot - rd * s.x;
    const double b2 = r * s.ydot - rd * s.y;
    out.xdot = (rnd * out.x + b1) / rn;
    out.ydot = (rnd * out.y + b2) / rn;
    return out;
}

State apply_flow(const GroupParams& gp, const State& s) {
    if (gp.eps == 0.0) return s;
    const TimeMap map(gp.rho, gp.t0, 1e-12);
    return apply_flow(map, gp.eps, s);
}

double solution_map_residual(const GeneralizedErmakov& sys, const Trajectory& traj,
                             const GroupParams& gp) {
    const auto& samples = traj.samples;
    if (samples.size() < 7)
        throw Error("solution_map_residual: need at least 7 samples");

    const TimeMap map(gp.rho, gp.t0, 1e-12);
    const double Ta = map.forward(samples.front().t);
    const double Tb = map.forward(samples.back().t);

    std::vector<double> tt, xb, yb, xdb, ydb;
    for (const auto& s : samples) {
        const double target = map.forward(s.t) + gp.eps;
        if (target < Ta - 1e-12 || target > Tb + 1e-12) continue; // flows off the sampled data
        const auto m = apply_flow(map, gp.eps, s);
        tt.push_back(m.t);
        xb.push_back(m.x);
        yb.push_back(m.y);
        xdb.push_back(m.xdot);
        ydb.push_back(m.ydot);
    }
    if (tt.size() < 7)
        throw Error("solution_map_residual: fewer than 7 samples stay within the window for "
                    "eps = " + std::to_string(gp.eps));

    const auto ax_fd = fd_derivative_5pt(tt, xdb);
    const auto ay_fd = fd_derivative_5pt(tt, ydb);

    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < tt.size(); ++i) {
        State m;
        m.t = tt[i];
        m.x = xb[i];
        m.y = yb[i];
        m.xdot = xdb[i];
        m.ydot = ydb[i];
        const Accel a = rhs_generalized(sys, m);
        worst = std::max(worst, std::abs(ax_fd[i] - a.ax));
        worst = std::max(worst, std::abs(ay_fd[i] - a.ay));
    }
    return worst;
}

SymmetryVerdict is_symmetric_frequency(const ExprAst& Omega2, const RhoSpec& rho,
                                       const std::vector<State>& sample_states,
                                       const std::vector<double>& eps_list, double tol) {
    if (sample_states.empty()) throw ConfigError("is_symmetric_frequency: no sample states");
    if (eps_list.empty()) throw ConfigError("is_symmetric_frequency: no eps values");
    if (!(tol > 0.0)) throw ConfigError("is_symmetric_frequency: tol must be positive");

    SymmetryVerdict verdict;
    verdict.worst_state = sample_states.front();
    const TimeMap map(rho, sample_states.front().t, 1e-12);
    bool first = true;
    for (const auto& s : sample_states) {
        const double base = sigma_star(Omega2, rho, s);
        const double scale = std::max(1.0, std::abs(base));
        for (const double eps : eps_list) {
            const auto m = apply_flow(map, eps, s);
            const double dev = std::abs(sigma_star(Omega2, rho, m) - base) / scale;
            if (first || dev > verdict.max_deviation) {
                verdict.max_deviation = dev;
                verdict.worst_state = s;
                verdict.worst_eps = eps;
                first = false;
            }
        }
    }
    verdict.symmetric = verdict.max_deviation <= tol;
    return verdict;
}

} // namespace ermakov
