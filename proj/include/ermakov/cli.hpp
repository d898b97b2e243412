// Command-line entry point: scenario configs in, CSV/SVG artifacts and
// pass/fail exit codes out.
//
// Exit codes: 0 success, 1 config or parse problem, 2 numerical failure
// (singularity, step underflow, unreachable targets), 3 a requested check
// failed (drift, residual or deviation above tolerance).
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ermakov/config.hpp"
#include "ermakov/expr.hpp"
#include "ermakov/ode.hpp"
#include "ermakov/state.hpp"

namespace ermakov {

// One system form plus initial state, integration window and check settings.
// Expressions parse eagerly so config mistakes surface before numerics run.
struct ScenarioConfig {
    enum class Form { Generalized, Symmetric, Traditional, RayReid };
    Form form = Form::Generalized;

    std::optional<ExprAst> F;        // over r
    std::optional<ExprAst> Omega2;   // over t, x, y, xdot, ydot
    std::optional<ExprAst> sigma;    // over a1, a2, b1, b2
    std::optional<ExprAst> omega;    // over t (unsquared)
    std::optional<ExprAst> f;        // over r
    std::optional<ExprAst> g;        // over rinv
    std::optional<ExprAst> G;       // over tau
    std::optional<ExprAst> rho_expr; // over t
    std::optional<double> rho0, rhodot0; // sampled scale factor alternative
    std::optional<double> Omega0;        // frequency-from-rho constant

    double q_ref = 0.0;
    double r_ref = 0.0;

    State initial;
    IntegratorConfig integ;
    double t_end = 0.0;
    std::size_t samples = 201;
    bool svg = true;

    std::optional<double> check_tol;
    std::vector<double> eps_list{0.1, 0.5, 1.0};

    double quasi_C0 = 1.0, quasi_Cdot0 = 0.0;
    double pinney_rho0 = 1.0, pinney_rhodot0 = 0.0;
    std::optional<ExprAst> pinney_omega; // over t; falls back to the system omega
};

ScenarioConfig load_scenario(const ConfigFile& file);

// Parses argv and runs one subcommand: simulate | invariants | symmetry |
// reduce | quasi | pinney | compare.
int run_cli(int argc, const char* const* argv);

} // namespace ermakov
