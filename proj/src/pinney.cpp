#include "ermakov/pinney.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "ermakov/errors.hpp"

namespace ermakov {

namespace {

// same density policy as the TDHO solver: comfortably below the integration
// error at the tolerances in use
std::size_t scalar_grid_size(double t0, double t_end) {
    const double span = t_end - t0;
    const double n = std::ceil(span * 128.0);
    return static_cast<std::size_t>(std::clamp(n, 128.0, 400000.0)) + 1;
}

} // namespace

RhoPath::RhoPath(ExprAst omega, HermitePath path)
    : omega_(std::move(omega)), path_(std::move(path)) {
    for (double r : path_.values())
        if (!(r > 0.0)) throw DomainError("auxiliary-equation path must stay positive");
}

double RhoPath::deriv2(double t) const {
    const double r = path_.value(t);
    const double w = eval(omega_, std::vector<double>{t});
    return 1.0 / (r * r * r) - w * w * r;
}

RhoPath solve_pinney(const ExprAst& omega, double rho0, double rhodot0, double t0, double t_end,
                     const IntegratorConfig& cfg) {
    if (omega.vars() != std::vector<std::string>{"t"})
        throw ConfigError("auxiliary-equation frequency must be an expression over t alone");
    if (!(rho0 > 0.0)) throw ConfigError("rho0 must be positive");
    if (!(t_end > t0)) throw ConfigError("integration window must have positive length");

    const auto accel = [&omega](double t, double r, double) {
        if (r <= 0.0) {
            std::ostringstream msg;
            msg << "rho collapsed to zero near t = " << t;
            throw IntegrationError(msg.str(), t);
        }
        const double w = eval(omega, std::vector<double>{t});
        return 1.0 / (r * r * r) - w * w * r;
    };
    const auto grid = linspace(t0, t_end, scalar_grid_size(t0, t_end));
    ScalarSolution sol = integrate_scalar2(accel, t0, rho0, rhodot0, t_end, cfg, grid);
    return RhoPath(omega, HermitePath(std::move(sol.t), std::move(sol.value), std::move(sol.deriv)));
}

RhoPath pinney_superposition(const CPath& u, const CPath& v, double A, double B, double C) {
    if (to_string(u.omega()) != to_string(v.omega()))
        throw ConfigError("superposition inputs must share one frequency");
    const auto& grid = u.path().grid();
    if (grid != v.path().grid())
        throw ConfigError("superposition inputs must share one grid");

    const auto& uv_ = u.path().values();
    const auto& ud_ = u.path().derivs();
    const auto& vv_ = v.path().values();
    const auto& vd_ = v.path().derivs();

    const double W = uv_[0] * vd_[0] - ud_[0] * vv_[0];
    if (std::fabs(W) < 1e-12)
        throw ConfigError("TDHO solutions are not independent (Wronskian ~ 0)");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double Wi = uv_[i] * vd_[i] - ud_[i] * vv_[i];
        if (std::fabs(Wi - W) > 1e-8 * std::max(1.0, std::fabs(W)))
            throw ConfigError("Wronskian drifts along the window; inputs do not solve one TDHO");
    }
    const double target = 1.0 / (W * W);
    if (std::fabs(A * C - B * B - target) > 1e-10 * std::max(1.0, target))
        throw ConfigError("coefficients must satisfy AC - B^2 = 1/W^2");

    std::vector<double> rho(grid.size()), rhodot(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double radicand = A * uv_[i] * uv_[i] + 2.0 * B * uv_[i] * vv_[i] + C * vv_[i] * vv_[i];
        if (!(radicand > 0.0))
            throw DomainError("superposition radicand is not positive on the window");
        rho[i] = std::sqrt(radicand);
        rhodot[i] = (A * uv_[i] * ud_[i] + B * (ud_[i] * vv_[i] + uv_[i] * vd_[i]) +
                     C * vv_[i] * vd_[i]) /
                    rho[i];
    }
    return RhoPath(u.omega(), HermitePath(grid, std::move(rho), std::move(rhodot)));
}

std::vector<double> pinney_residuals(const RhoPath& rho) {
    const auto& grid = rho.path().grid();
    const auto& r = rho.path().values();
    const auto& rd = rho.path().derivs();
    const std::vector<double> rdd = fd_derivative_5pt(grid, rd);
    std::vector<double> res(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = eval(rho.omega(), std::vector<double>{grid[i]});
        res[i] = rdd[i] + w * w * r[i] - 1.0 / (r[i] * r[i] * r[i]);
    }
    return res;
}

} // namespace ermakov
