#include "ermakov/ode.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "ermakov/errors.hpp"

namespace ermakov {

void IntegratorConfig::validate() const {
    if (!(rtol > 0.0) || !(atol > 0.0)) throw Error("integrator: rtol and atol must be positive");
    if (!(h_min > 0.0) || !(h_min <= h_init) || !(h_init <= h_max))
        throw Error("integrator: need 0 < h_min <= h_init <= h_max");
    if (max_steps <= 0) throw Error("integrator: max_steps must be positive");
}

namespace {

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;

void check_grid(double t0, double t_end, const std::vector<double>& grid) {
    if (!(t_end >= t0)) throw Error("integrator: t_end must not precede the initial time");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < t0 || grid[i] > t_end)
            throw Error("integrator: grid point outside [t0, t_end]");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw Error("integrator: grid must be strictly increasing");
    }
}

template <int N>
std::string describe_state(double t, const Vec<N>& y) {
    std::ostringstream os;
    os << "t=" << t << ", state=(";
    for (int i = 0; i < N; ++i) os << (i ? ", " : "") << y[i];
    os << ")";
    return os.str();
}

// Dormand-Prince 5(4) with the classic fifth-order dense-output polynomial.
// Sink is called once per grid point, in order, with (t, y_at_t).
template <int N, class RHS, class Sink>
StepStats dopri5(RHS&& rhs, double t0, Vec<N> y, double t_end, const IntegratorConfig& cfg,
                 const std::vector<double>& grid, Sink&& sink) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

    StepStats stats;
    double t = t0;
    std::size_t gi = 0;
    while (gi < grid.size() && grid[gi] <= t) {
        sink(grid[gi], y);
        ++gi;
    }
    if (t_end == t0) return stats;

    Vec<N> k1 = rhs(t, y);
    ++stats.rhs_evals;
    if (!k1.allFinite())
        throw IntegrationError("initial right-hand side is not finite at " + describe_state(t, y),
                               t);

    double h = std::clamp(cfg.h_init, cfg.h_min, std::min(cfg.h_max, t_end - t0));
    double err_prev = 1.0;
    long attempts = 0;

    while (t < t_end) {
        if (++attempts > cfg.max_steps)
            throw IntegrationError("step budget exhausted at " + describe_state(t, y), t);

        const bool last = (t + h >= t_end);
        if (last) h = t_end - t;

        const Vec<N> k2 = rhs(t + c2 * h, Vec<N>(y + h * (a21 * k1)));
        const Vec<N> k3 = rhs(t + c3 * h, Vec<N>(y + h * (a31 * k1 + a32 * k2)));
        const Vec<N> k4 = rhs(t + c4 * h, Vec<N>(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
        const Vec<N> k5 =
            rhs(t + c5 * h, Vec<N>(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
        const Vec<N> k6 =
            rhs(t + h, Vec<N>(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
        const Vec<N> ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Vec<N> k7 = rhs(t + h, ynew);
        stats.rhs_evals += 6;

        bool reject;
        double err = 0.0;
        if (!ynew.allFinite() || !k7.allFinite()) {
            reject = true;
            err = 10.0; // force a strong step reduction
        } else {
            const Vec<N> ev = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            double acc = 0.0;
            for (int i = 0; i < N; ++i) {
                const double sc =
                    cfg.atol + cfg.rtol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
                const double r = ev[i] / sc;
                acc += r * r;
            }
            err = std::sqrt(acc / N);
            reject = !(err <= 1.0);
        }

        if (reject) {
            ++stats.rejected;
            const double fac = std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
            h *= std::min(fac, 1.0);
            if (h < cfg.h_min)
                throw IntegrationError(
                    "step size underflow; last good " + describe_state(t, y), t);
            continue;
        }

        // dense-output coefficients for this accepted step
        const Vec<N> ydiff = ynew - y;
        const Vec<N> bspl = h * k1 - ydiff;
        const Vec<N> cont4 = ydiff - h * k7 - bspl;
        const Vec<N> cont5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        const double t_new = last ? t_end : t + h;
        while (gi < grid.size() && grid[gi] <= t_new) {
            const double theta = (grid[gi] - t) / h;
            const double th1 = 1.0 - theta;
            const Vec<N> u = y + theta * (ydiff + th1 * (bspl + theta * (cont4 + th1 * cont5)));
            sink(grid[gi], u);
            ++gi;
        }

        ++stats.accepted;
        t = t_new;
        y = ynew;
        k1 = k7; // first-same-as-last

        double fac;
        if (err == 0.0) {
            fac = 5.0;
        } else {
            fac = 0.9 * std::pow(err, -0.14) * std::pow(err_prev, 0.08);
            fac = std::clamp(fac, 0.2, 5.0);
        }
        err_prev = std::max(err, 1e-4);
        h = std::clamp(h * fac, cfg.h_min, cfg.h_max);
    }
    return stats;
}

// Fixed-step classical RK4; h_init is snapped so an integer number of steps
// covers the span exactly.  Dense output: cubic Hermite per step.
template <int N, class RHS, class Sink>
StepStats rk4(RHS&& rhs, double t0, Vec<N> y, double t_end, const IntegratorConfig& cfg,
              const std::vector<double>& grid, Sink&& sink) {
    StepStats stats;
    double t = t0;
    std::size_t gi = 0;
    while (gi < grid.size() && grid[gi] <= t) {
        sink(grid[gi], y);
        ++gi;
    }
    if (t_end == t0) return stats;

    const double span = t_end - t0;
    const long n = std::max(1L, std::lround(span / cfg.h_init));
    if (n > cfg.max_steps) throw IntegrationError("step budget exhausted", t0);
    const double h = span / static_cast<double>(n);

    Vec<N> k1 = rhs(t, y);
    ++stats.rhs_evals;
    for (long step = 0; step < n; ++step) {
        const Vec<N> k2 = rhs(t + 0.5 * h, Vec<N>(y + 0.5 * h * k1));
        const Vec<N> k3 = rhs(t + 0.5 * h, Vec<N>(y + 0.5 * h * k2));
        const Vec<N> k4 = rhs(t + h, Vec<N>(y + h * k3));
        const Vec<N> ynew = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double t_new = (step == n - 1) ? t_end : t + h;
        const Vec<N> k1_new = rhs(t_new, ynew);
        stats.rhs_evals += 4;
        if (!ynew.allFinite())
            throw IntegrationError("state is not finite; last good " + describe_state(t, y), t);

        while (gi < grid.size() && grid[gi] <= t_new) {
            const double s = (grid[gi] - t) / h;
            const double s2 = s * s, s3 = s2 * s;
            const Vec<N> u = (2 * s3 - 3 * s2 + 1) * y + (s3 - 2 * s2 + s) * h * k1 +
                             (-2 * s3 + 3 * s2) * ynew + (s3 - s2) * h * k1_new;
            sink(grid[gi], u);
            ++gi;
        }

        ++stats.accepted;
        t = t_new;
        y = ynew;
        k1 = k1_new;
    }
    return stats;
}

template <int N, class RHS, class Sink>
StepStats run(const IntegratorConfig& cfg, RHS&& rhs, double t0, const Vec<N>& y0, double t_end,
              const std::vector<double>& grid, Sink&& sink) {
    cfg.validate();
    check_grid(t0, t_end, grid);
    if (cfg.method == IntegratorConfig::Method::RK4)
        return rk4<N>(rhs, t0, y0, t_end, cfg, grid, sink);
    return dopri5<N>(rhs, t0, y0, t_end, cfg, grid, sink);
}

} // namespace

Trajectory integrate(const PlanarAccel& accel, const State& s0, double t_end,
                     const IntegratorConfig& cfg, const std::vector<double>& grid,
                     std::string system_id) {
    if (!s0.finite()) throw Error("integrate: initial state is not finite");

    Trajectory traj;
    traj.system_id = std::move(system_id);
    traj.config = cfg;
    traj.samples.reserve(grid.size());

    const auto rhs = [&accel](double t, const Vec<4>& y) {
        const State s{t, y[0], y[1], y[2], y[3]};
        const Accel a = accel(s);
        return Vec<4>{y[2], y[3], a.ax, a.ay};
    };
    const Vec<4> y0{s0.x, s0.y, s0.xdot, s0.ydot};
    traj.stats = run<4>(cfg, rhs, s0.t, y0, t_end, grid, [&](double t, const Vec<4>& y) {
        traj.samples.push_back(State{t, y[0], y[1], y[2], y[3]});
    });
    return traj;
}

ScalarSolution integrate_scalar2(const ScalarAccel& accel, double t0, double c0, double cdot0,
                                 double t_end, const IntegratorConfig& cfg,
                                 const std::vector<double>& grid) {
    ScalarSolution sol;
    sol.t.reserve(grid.size());
    sol.value.reserve(grid.size());
    sol.deriv.reserve(grid.size());
    sol.accel.reserve(grid.size());

    const auto rhs = [&accel](double t, const Vec<2>& y) {
        return Vec<2>{y[1], accel(t, y[0], y[1])};
    };
    const Vec<2> y0{c0, cdot0};
    sol.stats = run<2>(cfg, rhs, t0, y0, t_end, grid, [&](double t, const Vec<2>& y) {
        sol.t.push_back(t);
        sol.value.push_back(y[0]);
        sol.deriv.push_back(y[1]);
        sol.accel.push_back(accel(t, y[0], y[1]));
    });
    return sol;
}

} // namespace ermakov
