// Initial-value integration for the planar systems and for auxiliary scalar
// second-order equations.  Two methods: adaptive Dormand-Prince 5(4) with a
// fifth-order continuous extension for dense output, and fixed-step RK4 for
// convergence studies.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ermakov/state.hpp"

namespace ermakov {

struct IntegratorConfig {
    enum class Method { DP45, RK4 };

    Method method = Method::DP45;
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 1e-3; // RK4: the fixed step (snapped to divide the span)
    double h_min = 1e-14;
    double h_max = 1e6;
    long max_steps = 10'000'000; // accepted + rejected attempts

    void validate() const; // throws Error on nonsense settings
};

struct StepStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evals = 0;
};

struct Trajectory {
    std::vector<State> samples; // at the requested grid times, in order
    std::string system_id;
    IntegratorConfig config;
    StepStats stats;
};

using PlanarAccel = std::function<Accel(const State&)>;

// Integrate xdd = ax(s), ydd = ay(s) from s0 to t_end (t_end >= s0.t) and
// sample the solution at `grid` (strictly increasing, within [s0.t, t_end]).
// Local error per step is kept at or below atol + rtol*|state| componentwise
// (RMS-scaled); grid values come from dense interpolation of accepted steps.
// Throws IntegrationError on step underflow, non-finite states or step budget
// exhaustion; exceptions from `accel` propagate.
Trajectory integrate(const PlanarAccel& accel, const State& s0, double t_end,
                     const IntegratorConfig& cfg, const std::vector<double>& grid,
                     std::string system_id = "");

// Scalar second-order equation cdd = accel(t, c, cdot), sampled on `grid`.
using ScalarAccel = std::function<double(double, double, double)>;

struct ScalarSolution {
    std::vector<double> t;
    std::vector<double> value;
    std::vector<double> deriv;
    std::vector<double> accel; // equation right-hand side at the samples
    StepStats stats;
};

ScalarSolution integrate_scalar2(const ScalarAccel& accel, double t0, double c0, double cdot0,
                                 double t_end, const IntegratorConfig& cfg,
                                 const std::vector<double>& grid);

} // namespace ermakov
