#include "ermakov/quasi.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ermakov/errors.hpp"
#include "ermakov/quadrature.hpp"
#include "ermakov/roots.hpp"

namespace ermakov {

namespace {

// shared by solve_tdho and solve_pinney: dense enough that cubic Hermite
// interpolation stays well below the integration tolerances in use
std::size_t scalar_grid_size(double t0, double t_end) {
    const double span = t_end - t0;
    const double n = std::ceil(span * 128.0);
    return static_cast<std::size_t>(std::clamp(n, 128.0, 400000.0)) + 1;
}

} // namespace

CPath::CPath(ExprAst omega, HermitePath path, bool truncated)
    : omega_(std::move(omega)), path_(std::move(path)), truncated_(truncated) {
    const auto& grid = path_.grid();
    const auto& c = path_.values();
    const double sign = c.front() > 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (sign * c[i] <= 0.0)
            throw DomainError("TDHO path changes sign inside its window");

    prefix_.resize(grid.size());
    prefix_[0] = 0.0;
    QuadratureOptions opt;
    opt.tol = 1e-14;
    const auto inv_c2 = [this](double t) {
        const double v = path_.value(t);
        return 1.0 / (v * v);
    };
    for (std::size_t i = 1; i < grid.size(); ++i)
        prefix_[i] = prefix_[i - 1] + integrate_adaptive(inv_c2, grid[i - 1], grid[i], opt);
}

double CPath::accel(double t) const {
    const double w = eval(omega_, std::vector<double>{t});
    return -w * w * path_.value(t);
}

double CPath::tbar_abs(double t) const {
    const auto& grid = path_.grid();
    if (t < grid.front() || t > grid.back())
        throw DomainError("time outside the TDHO path window");
    const auto it = std::upper_bound(grid.begin(), grid.end(), t);
    const std::size_t seg = static_cast<std::size_t>(std::max<std::ptrdiff_t>(
        0, std::distance(grid.begin(), it) - 1));
    QuadratureOptions opt;
    opt.tol = 1e-14;
    const auto inv_c2 = [this](double tt) {
        const double v = path_.value(tt);
        return 1.0 / (v * v);
    };
    return prefix_[seg] + integrate_adaptive(inv_c2, grid[seg], t, opt);
}

double CPath::tbar(double t0, double t) const { return tbar_abs(t) - tbar_abs(t0); }

double CPath::invert_tbar(double t0, double tb) const {
    const double lo = t_front(), hi = t_back();
    const double base = tbar_abs(t0);
    const double target = base + tb;
    const double Tlo = 0.0, Thi = tbar_abs(hi);
    if (target < Tlo - 1e-12 || target > Thi + 1e-12)
        throw RootFindError("tbar target outside the attainable range of the window");
    const double clamped = std::clamp(target, Tlo, Thi);
    RootOptions opt;
    opt.tol_f = 1e-13;
    return find_root_bracketed([&](double t) { return tbar_abs(t) - clamped; }, lo, hi, opt);
}

CPath solve_tdho(const ExprAst& omega, double C0, double Cdot0, double t0, double t_end,
                 const IntegratorConfig& cfg) {
    if (omega.vars() != std::vector<std::string>{"t"})
        throw ConfigError("TDHO frequency must be an expression over t alone");
    if (C0 == 0.0 && Cdot0 == 0.0)
        throw ConfigError("TDHO needs a nonzero initial condition");
    if (!(t_end > t0)) throw ConfigError("TDHO window must have positive length");

    const auto grid = linspace(t0, t_end, scalar_grid_size(t0, t_end));
    const auto accel = [&omega](double t, double c, double) {
        const double w = eval(omega, std::vector<double>{t});
        return -w * w * c;
    };
    const ScalarSolution sol = integrate_scalar2(accel, t0, C0, Cdot0, t_end, cfg, grid);

    // keep the leading stretch where C holds one sign; a node at t0 itself
    // (C0 = 0) just shifts the window start to the next grid point
    std::size_t start = 0;
    while (start < sol.value.size() && sol.value[start] == 0.0) ++start;
    if (start >= sol.value.size())
        throw DomainError("C vanishes on the whole window");
    const double sign = sol.value[start] > 0.0 ? 1.0 : -1.0;
    std::size_t stop = start;
    while (stop < sol.value.size() && sign * sol.value[stop] > 0.0) ++stop;
    const bool truncated = start > 0 || stop < sol.value.size();
    if (stop - start < 2) throw DomainError("C crosses zero immediately; window unusable");

    const auto lo = static_cast<std::ptrdiff_t>(start);
    const auto hi = static_cast<std::ptrdiff_t>(stop);
    std::vector<double> t(sol.t.begin() + lo, sol.t.begin() + hi);
    std::vector<double> c(sol.value.begin() + lo, sol.value.begin() + hi);
    std::vector<double> cd(sol.deriv.begin() + lo, sol.deriv.begin() + hi);
    return CPath(omega, HermitePath(std::move(t), std::move(c), std::move(cd)), truncated);
}

QuasiState quasi_transform(const CPath& cpath, const State& s, double t0) {
    const double c = cpath.value(s.t);
    const double cd = cpath.deriv(s.t);
    QuasiState q;
    q.tbar = cpath.tbar(t0, s.t);
    q.xbar = s.x / c;
    q.ybar = s.y / c;
    q.xbar_prime = c * s.xdot - cd * s.x;
    q.ybar_prime = c * s.ydot - cd * s.y;
    return q;
}

State quasi_inverse(const CPath& cpath, const QuasiState& qs, double t0) {
    const double t = cpath.invert_tbar(t0, qs.tbar);
    const double c = cpath.value(t);
    const double cd = cpath.deriv(t);
    State s;
    s.t = t;
    s.x = qs.xbar * c;
    s.y = qs.ybar * c;
    s.xdot = (qs.xbar_prime + cd * s.x) / c;
    s.ydot = (qs.ybar_prime + cd * s.y) / c;
    return s;
}

double sl2_residual(const ExprAst& f, const ExprAst& g, const std::vector<QuasiState>& traj) {
    const std::size_t n = traj.size();
    if (n < 7) throw Error("sl2 residual needs at least seven transformed samples");
    std::vector<double> tb(n), xp(n), yp(n);
    for (std::size_t i = 0; i < n; ++i) {
        tb[i] = traj[i].tbar;
        xp[i] = traj[i].xbar_prime;
        yp[i] = traj[i].ybar_prime;
    }
    const std::vector<double> xpp = fd_derivative_5pt(tb, xp);
    const std::vector<double> ypp = fd_derivative_5pt(tb, yp);

    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const double xb = traj[i].xbar, yb = traj[i].ybar;
        if (std::fabs(xb) < 1e-300 || std::fabs(yb) < 1e-300)
            throw SingularError("transformed sample sits on a coordinate axis");
        const double fx = eval(f, std::vector<double>{yb / xb}) / (yb * xb * xb);
        const double gy = eval(g, std::vector<double>{xb / yb}) / (xb * yb * yb);
        worst = std::max(worst, std::fabs(xpp[i] - fx));
        worst = std::max(worst, std::fabs(ypp[i] - gy));
    }
    return worst;
}

} // namespace ermakov
