// Scenario loading and the subcommand handlers behind the ermakov binary.
// Every handler reads one config, writes CSV (and optional SVG) artifacts
// under --out, prints a short summary and exits 0/1/2/3: success, config
// problem, numerical failure, check failed.

#include "ermakov/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ermakov/csv.hpp"
#include "ermakov/errors.hpp"
#include "ermakov/invariants.hpp"
#include "ermakov/numerics.hpp"
#include "ermakov/pinney.hpp"
#include "ermakov/quasi.hpp"
#include "ermakov/reduction.hpp"
#include "ermakov/svg.hpp"
#include "ermakov/symmetry.hpp"
#include "ermakov/systems.hpp"

namespace ermakov {
namespace {

namespace fs = std::filesystem;

struct CliOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<double> tol_override;
    bool quiet = false;
    bool debug = false;
};

struct Log {
    bool quiet = false;
    bool debug_on = false;

    void info(const std::string& msg) const {
        if (!quiet) std::cout << msg << "\n";
    }
    void debug(const std::string& msg) const {
        if (debug_on) std::cerr << "[ermakov] " << msg << "\n";
    }
};

ExprAst parse_key(const ConfigFile& c, const std::string& sec, const std::string& key,
                  const std::vector<std::string>& vars) {
    const std::string src = c.get(sec, key);
    try {
        return parse_expression(src, vars);
    } catch (const ParseError& e) {
        throw ParseError(sec + "." + key + ": " + e.what(), e.offset);
    } catch (const Error& e) {
        throw ConfigError(sec + "." + key + ": " + e.what());
    }
}

ExprAst parse_key_or(const ConfigFile& c, const std::string& sec, const std::string& key,
                     const std::vector<std::string>& vars, const std::string& fallback) {
    if (c.has(sec, key)) return parse_key(c, sec, key, vars);
    return parse_expression(fallback, vars);
}

// Reference lower limit for the stored antiderivatives: 0 when the integrand
// is regular there, 1 otherwise.
double default_ref(const ExprAst& integrand) {
    try {
        if (std::isfinite(eval(integrand, std::vector<double>{0.0}))) return 0.0;
    } catch (const Error&) {
    }
    return 1.0;
}

std::size_t parse_samples(const ConfigFile& c) {
    const double raw = c.number_or("integration", "samples", 201.0);
    if (raw < 2.0 || raw != std::floor(raw))
        throw ConfigError("integration.samples must be an integer >= 2");
    return static_cast<std::size_t>(raw);
}

struct BuiltSystem {
    GeneralizedErmakov sys;
    std::optional<RayReidSpec> spec; // coupled-pair scenarios only
    std::optional<RhoSpec> rho;
};

RhoSpec make_rayreid_rho(const ScenarioConfig& sc) {
    if (sc.rho_expr) return RhoSpec(*sc.rho_expr);
    // Sampled scale factor: solve the auxiliary equation tighter than the
    // trajectory tolerance so its interpolation error stays subdominant.
    IntegratorConfig cfg;
    cfg.rtol = 1e-12;
    cfg.atol = 1e-14;
    return RhoSpec(solve_pinney(*sc.omega, *sc.rho0, *sc.rhodot0, sc.initial.t, sc.t_end, cfg));
}

BuiltSystem build_system(const ScenarioConfig& sc) {
    switch (sc.form) {
    case ScenarioConfig::Form::Generalized: {
        if (sc.Omega2) {
            std::optional<RhoSpec> rho;
            if (sc.rho_expr) rho = RhoSpec(*sc.rho_expr);
            return {GeneralizedErmakov(*sc.F, *sc.Omega2), std::nullopt, std::move(rho)};
        }
        RhoSpec rho(*sc.rho_expr);
        ExprAst omega2 = omega_from_rho(rho, *sc.Omega0);
        return {GeneralizedErmakov(*sc.F, std::move(omega2)), std::nullopt, std::move(rho)};
    }
    case ScenarioConfig::Form::Symmetric: {
        RhoSpec rho(*sc.rho_expr);
        const SymmetricFrequency sf(rho, *sc.sigma);
        return {GeneralizedErmakov(*sc.F, omega2_symmetric(sf)), std::nullopt, std::move(rho)};
    }
    case ScenarioConfig::Form::Traditional:
        return {GeneralizedErmakov(*sc.F, omega2_traditional(*sc.omega, *sc.g)), std::nullopt,
                std::nullopt};
    case ScenarioConfig::Form::RayReid: {
        RhoSpec rho = make_rayreid_rho(sc);
        RayReidSpec spec =
            RayReidSpec::from_omega(*sc.omega, *sc.G, rho, sc.initial.t, sc.t_end);
        ExprAst omega2 = rayreid_omega2(spec);
        return {GeneralizedErmakov(*sc.F, std::move(omega2)), std::move(spec), std::move(rho)};
    }
    }
    throw Error("unhandled system form");
}

std::vector<double> sample_grid(const ScenarioConfig& sc) {
    return linspace(sc.initial.t, sc.t_end, sc.samples);
}

Trajectory run_trajectory(const BuiltSystem& built, const ScenarioConfig& sc) {
    return integrate(planar_accel(built.sys), sc.initial, sc.t_end, sc.integ, sample_grid(sc),
                     "scenario");
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw Error("cannot open output file: " + p.string());
    return os;
}

void write_trajectory_csv(const fs::path& p, const Trajectory& traj,
                          const std::vector<std::string>& extra_names = {},
                          const std::vector<std::vector<double>>& extra_cols = {}) {
    auto os = open_out(p);
    CsvWriter w(os);
    std::vector<std::string> names{"t", "x", "y", "xdot", "ydot"};
    names.insert(names.end(), extra_names.begin(), extra_names.end());
    w.header(names);
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const State& s = traj.samples[i];
        std::vector<double> row{s.t, s.x, s.y, s.xdot, s.ydot};
        for (const auto& col : extra_cols) row.push_back(col.at(i));
        w.row(row);
    }
}

void write_trajectory_svg(const fs::path& dir, const Trajectory& traj) {
    std::vector<double> t, x, y;
    t.reserve(traj.samples.size());
    x.reserve(traj.samples.size());
    y.reserve(traj.samples.size());
    for (const State& s : traj.samples) {
        t.push_back(s.t);
        x.push_back(s.x);
        y.push_back(s.y);
    }
    write_svg_polylines((dir / "timeseries.svg").string(),
                        {{t, x, "#1f77b4"}, {t, y, "#d62728"}}, "x(t) and y(t)");
    write_svg_polylines((dir / "orbit.svg").string(), {{x, y, "#1f77b4"}}, "orbit");
}

std::optional<double> effective_tol(const ScenarioConfig& sc, const CliOptions& o) {
    if (o.tol_override) {
        if (*o.tol_override <= 0.0) throw ConfigError("--tol must be > 0");
        return o.tol_override;
    }
    return sc.check_tol;
}

// Shared tail of every checking command: compare, report, pick the exit code.
int finish_check(const Log& log, const std::optional<double>& tol, double worst,
                 const std::string& what) {
    if (!tol) return 0;
    if (worst <= *tol) {
        log.info("check passed: " + what + " = " + format_double(worst) +
                 " <= tol = " + format_double(*tol));
        return 0;
    }
    std::cerr << "check failed: " << what << " = " << format_double(worst)
              << " > tol = " << format_double(*tol) << "\n";
    return 3;
}

std::string describe_stats(const Trajectory& traj) {
    return "steps accepted/rejected = " + std::to_string(traj.stats.accepted) + "/" +
           std::to_string(traj.stats.rejected) +
           ", rhs evals = " + std::to_string(traj.stats.rhs_evals);
}

int cmd_simulate(const ScenarioConfig& sc, const CliOptions& o, const Log& log,
                 const fs::path& out) {
    const BuiltSystem built = build_system(sc);
    const Trajectory traj = run_trajectory(built, sc);
    write_trajectory_csv(out / "trajectory.csv", traj);
    if (sc.svg) write_trajectory_svg(out, traj);
    log.debug(describe_stats(traj));
    log.info("simulate: " + std::to_string(traj.samples.size()) + " samples on [" +
             format_double(sc.initial.t) + ", " + format_double(sc.t_end) +
             "] -> trajectory.csv" + (sc.svg ? " (+ timeseries.svg, orbit.svg)" : ""));
    (void)o;
    return 0;
}

int cmd_invariants(const ScenarioConfig& sc, const CliOptions& o, const Log& log,
                   const fs::path& out) {
    const BuiltSystem built = build_system(sc);
    const Trajectory traj = run_trajectory(built, sc);

    std::vector<InvariantReport> reports;
    reports.push_back(drift_report(traj, "I", [&](const State& s) {
        return ermakov_lewis_I(built.sys.F, s, sc.r_ref);
    }));
    if (built.spec) {
        reports.push_back(drift_report(traj, "J", [&](const State& s) {
            return rayreid_J(*built.spec, s, sc.q_ref);
        }));
        reports.push_back(drift_report(traj, "H", [&](const State& s) {
            return hamiltonian_H(*built.spec, s, sc.q_ref);
        }));
    }

    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
    for (const auto& r : reports) {
        names.push_back(r.name);
        cols.push_back(r.values);
    }
    write_trajectory_csv(out / "invariants.csv", traj, names, cols);

    // H is conserved only when omega is constant; it is reported, not checked.
    double worst = 0.0;
    for (const auto& r : reports) {
        log.info(r.name + ": start = " + format_double(r.values.front()) +
                 ", max |drift| = " + format_double(r.max_abs_drift) +
                 ", max relative drift = " + format_double(r.max_rel_drift));
        if (r.name != "H") worst = std::max(worst, r.max_rel_drift);
    }
    log.debug(describe_stats(traj));
    return finish_check(log, effective_tol(sc, o), worst, "max relative invariant drift");
}

int cmd_symmetry(const ScenarioConfig& sc, const CliOptions& o, const Log& log,
                 const fs::path& out) {
    const BuiltSystem built = build_system(sc);
    if (!built.rho)
        throw ConfigError(
            "symmetry needs a scale factor: set system.rho (or rho0/rhodot0 for the "
            "coupled-pair form)");
    const RhoSpec& rho = *built.rho;

    const Trajectory traj = run_trajectory(built, sc);
    std::vector<State> states;
    const std::size_t want = std::min<std::size_t>(16, traj.samples.size());
    for (std::size_t k = 0; k < want; ++k)
        states.push_back(traj.samples[k * (traj.samples.size() - 1) / (want - 1)]);

    // The flow must keep T(t) + eps attainable on the integrated window, or
    // the inverse time map has nothing to return.
    const TimeMap map(rho, sc.initial.t);
    const double T_end = map.forward(sc.t_end);
    const double tol = effective_tol(sc, o).value_or(1e-8);

    auto os = open_out(out / "sigma_star.csv");
    CsvWriter w(os);
    w.header({"eps", "max_deviation", "worst_t", "worst_x", "worst_y", "worst_xdot",
              "worst_ydot"});

    bool symmetric = true;
    double max_dev = 0.0;
    for (const double eps : sc.eps_list) {
        std::vector<State> usable;
        for (const State& s : states)
            if (map.forward(s.t) + eps <= T_end + 1e-12) usable.push_back(s);
        if (usable.empty())
            throw ConfigError("check.eps = " + format_double(eps) +
                              " maps every sample state beyond the integrated window; shorten "
                              "eps or extend t_end");
        const SymmetryVerdict v = is_symmetric_frequency(built.sys.Omega2, rho, usable, {eps}, tol);
        symmetric = symmetric && v.symmetric;
        max_dev = std::max(max_dev, v.max_deviation);
        w.row({eps, v.max_deviation, v.worst_state.t, v.worst_state.x, v.worst_state.y,
               v.worst_state.xdot, v.worst_state.ydot});
        log.debug("eps = " + format_double(eps) + ": " + std::to_string(usable.size()) +
                  " states, max deviation = " + format_double(v.max_deviation));
    }

    log.info(std::string("symmetry: sigma* orbit invariance ") +
             (symmetric ? "holds" : "FAILS") + ", max relative deviation = " +
             format_double(max_dev) + " (tol = " + format_double(tol) + ") -> sigma_star.csv");
    if (!symmetric)
        std::cerr << "check failed: frequency is not of the invariant form for this rho "
                     "(max deviation = "
                  << format_double(max_dev) << " > tol = " << format_double(tol) << ")\n";
    return symmetric ? 0 : 3;
}

struct ReduceOutcome {
    Trajectory direct;
    QuadratureSolution sol;
    Trajectory reconstructed;
    double I = 0.0, J = 0.0;
    double max_dx = 0.0, max_dy = 0.0;
    std::vector<double> inte1_res, inte2_res;
};

ReduceOutcome run_reduction(const ScenarioConfig& sc, const BuiltSystem& built) {
    if (!built.spec)
        throw ConfigError("reduce/compare need the coupled-pair form (system.form = rayreid)");
    const RhoSpec& rho = *built.rho;
    const double t0 = sc.initial.t;

    ReduceOutcome rc;
    rc.direct = run_trajectory(built, sc);
    rc.I = ermakov_lewis_I(built.sys.F, sc.initial, sc.r_ref);
    rc.J = rayreid_J(*built.spec, sc.initial, sc.q_ref);

    const ReducedState r0 = to_group_coords(sc.initial, rho, t0);
    const TimeMap map(rho, t0);
    std::vector<double> T_grid;
    T_grid.reserve(sc.samples);
    for (const State& s : rc.direct.samples) T_grid.push_back(map.forward(s.t));

    rc.sol = solve_by_quadrature(built.spec->G(), rc.I, rc.J, r0, T_grid, sc.q_ref, sc.integ);
    const int sx = sc.initial.x >= 0.0 ? 1 : -1;
    const int sy = sc.initial.y >= 0.0 ? 1 : -1;
    rc.reconstructed = back_map(rho, rc.sol, sx, sy, t0);

    for (std::size_t i = 0; i < rc.direct.samples.size(); ++i) {
        rc.max_dx = std::max(rc.max_dx,
                             std::abs(rc.reconstructed.samples[i].x - rc.direct.samples[i].x));
        rc.max_dy = std::max(rc.max_dy,
                             std::abs(rc.reconstructed.samples[i].y - rc.direct.samples[i].y));
    }

    // Printed first-integral relations: q s'/s = sign sqrt(2I), q'^2 = P(q).
    const double L0 = sc.initial.x * sc.initial.ydot - sc.initial.y * sc.initial.xdot;
    const double kappa = (L0 > 0.0 ? 1.0 : (L0 < 0.0 ? -1.0 : 0.0)) * std::sqrt(2.0 * rc.I);
    for (std::size_t i = 0; i < rc.sol.q.size(); ++i) {
        const double q = rc.sol.q[i];
        rc.inte1_res.push_back(std::abs(q * rc.sol.sprime[i] / rc.sol.s[i] - kappa));
        const double Gq =
            integral(built.spec->G(), "tau", sc.q_ref, q, std::vector<double>{0.0}, 1e-12);
        const double P = 2.0 * rc.I + 4.0 * q * (rc.J - q + Gq);
        rc.inte2_res.push_back(std::abs(rc.sol.qprime[i] * rc.sol.qprime[i] - P));
    }
    return rc;
}

int cmd_reduce(const ScenarioConfig& sc, const CliOptions& o, const Log& log,
               const fs::path& out) {
    const BuiltSystem built = build_system(sc);
    const ReduceOutcome rc = run_reduction(sc, built);

    auto os = open_out(out / "reduced.csv");
    CsvWriter w(os);
    w.header({"T", "q", "qprime", "s", "sprime", "t", "x", "y", "inte1_residual",
              "inte2_residual"});
    for (std::size_t i = 0; i < rc.sol.q.size(); ++i) {
        const State& b = rc.reconstructed.samples[i];
        w.row({rc.sol.T_grid[i], rc.sol.q[i], rc.sol.qprime[i], rc.sol.s[i], rc.sol.sprime[i],
               b.t, b.x, b.y, rc.inte1_res[i], rc.inte2_res[i]});
    }
    if (sc.svg)
        write_svg_polylines((out / "reduced.svg").string(),
                            {{rc.sol.T_grid, rc.sol.q, "#1f77b4"},
                             {rc.sol.T_grid, rc.sol.s, "#d62728"}},
                            "q(T) and s(T)");

    log.info("reduce: I = " + format_double(rc.I) + ", J = " + format_double(rc.J));
    log.info("reduce: max |q s'/s - sqrt(2I)| = " +
             format_double(*std::max_element(rc.inte1_res.begin(), rc.inte1_res.end())) +
             ", max |q'^2 - P(q)| = " +
             format_double(*std::max_element(rc.inte2_res.begin(), rc.inte2_res.end())));
    log.info("reduce: quadrature vs direct max |dx| = " + format_double(rc.max_dx) +
             ", max |dy| = " + format_double(rc.max_dy) + " -> reduced.csv");
    return finish_check(log, effective_tol(sc, o), std::max(rc.max_dx, rc.max_dy),
                        "max reconstruction deviation");
}

int cmd_compare(const ScenarioConfig& sc, const CliOptions& o, const Log& log,
                const fs::path& out) {
    const BuiltSystem built = build_system(sc);
    const ReduceOutcome rc = run_reduction(sc, built);

    auto os = open_out(out / "compare.csv");
    CsvWriter w(os);
    w.header({"t", "x_direct", "x_quadrature", "dx", "y_direct", "y_quadrature", "dy"});
    for (std::size_t i = 0; i < rc.direct.samples.size(); ++i) {
        const State& d = rc.direct.samples[i];
        const State& b = rc.reconstructed.samples[i];
        w.row({d.t, d.x, b.x, b.x - d.x, d.y, b.y, b.y - d.y});
    }

    log.info("compare: direct integration vs solution by quadrature, " +
             std::to_string(rc.direct.samples.size()) + " samples -> compare.csv");
    log.info("compare: max |dx| = " + format_double(rc.max_dx) +
             ", max |dy| = " + format_double(rc.max_dy));
    const double tol = effective_tol(sc, o).value_or(1e-5);
    return finish_check(log, tol, std::max(rc.max_dx, rc.max_dy), "max deviation");
}

int cmd_quasi(const ScenarioConfig& sc, const CliOptions& o, const Log& log,
              const fs::path& out) {
    if (sc.form != ScenarioConfig::Form::Traditional)
        throw ConfigError("quasi needs the traditional form (system.form = traditional)");
    if (sc.samples < 7) throw ConfigError("quasi needs integration.samples >= 7");
    const BuiltSystem built = build_system(sc);

    const CPath C =
        solve_tdho(*sc.omega, sc.quasi_C0, sc.quasi_Cdot0, sc.initial.t, sc.t_end, sc.integ);
    const double t_hi = C.t_back();
    if (C.truncated())
        log.info("note: C(t) crosses zero; window cut to [" + format_double(sc.initial.t) +
                 ", " + format_double(t_hi) + "]");

    const Trajectory traj = integrate(planar_accel(built.sys), sc.initial, t_hi, sc.integ,
                                      linspace(sc.initial.t, t_hi, sc.samples), "scenario");
    std::vector<QuasiState> qs;
    qs.reserve(traj.samples.size());
    for (const State& s : traj.samples) qs.push_back(quasi_transform(C, s, sc.initial.t));

    auto os = open_out(out / "quasi.csv");
    CsvWriter w(os);
    w.header({"t", "tbar", "xbar", "ybar", "xbar_prime", "ybar_prime"});
    for (std::size_t i = 0; i < qs.size(); ++i)
        w.row({traj.samples[i].t, qs[i].tbar, qs[i].xbar, qs[i].ybar, qs[i].xbar_prime,
               qs[i].ybar_prime});
    if (sc.svg) {
        std::vector<double> tb, xb, yb;
        for (const QuasiState& q : qs) {
            tb.push_back(q.tbar);
            xb.push_back(q.xbar);
            yb.push_back(q.ybar);
        }
        write_svg_polylines((out / "quasi.svg").string(),
                            {{tb, xb, "#1f77b4"}, {tb, yb, "#d62728"}},
                            "xbar(tbar) and ybar(tbar)");
    }

    const double res = sl2_residual(*sc.f, *sc.g, qs);
    log.info("quasi: " + std::to_string(qs.size()) + " transformed samples -> quasi.csv");
    log.info("quasi: max autonomous-pair residual = " + format_double(res));
    return finish_check(log, effective_tol(sc, o), res, "autonomous-pair residual");
}

int cmd_pinney(const ScenarioConfig& sc, const CliOptions& o, const Log& log,
               const fs::path& out) {
    const ExprAst* omega = sc.pinney_omega ? &*sc.pinney_omega : (sc.omega ? &*sc.omega : nullptr);
    if (!omega)
        throw ConfigError("pinney needs a frequency: set pinney.omega or a system omega");

    const RhoPath path = solve_pinney(*omega, sc.pinney_rho0, sc.pinney_rhodot0, sc.initial.t,
                                      sc.t_end, sc.integ);
    const std::vector<double> res = pinney_residuals(path);
    const double max_res = *std::max_element(res.begin(), res.end(),
                                             [](double a, double b) {
                                                 return std::abs(a) < std::abs(b);
                                             });

    const auto& grid = path.path().grid();
    auto os = open_out(out / "pinney.csv");
    CsvWriter w(os);
    w.header({"t", "rho", "rhodot", "rhoddot", "residual"});
    for (std::size_t i = 0; i < grid.size(); ++i)
        w.row({grid[i], path.path().values()[i], path.path().derivs()[i], path.deriv2(grid[i]),
               res[i]});
    if (sc.svg)
        write_svg_polylines((out / "pinney.svg").string(),
                            {{grid, path.path().values(), "#1f77b4"}}, "rho(t)");

    log.info("pinney: " + std::to_string(grid.size()) + " samples on [" +
             format_double(path.t_front()) + ", " + format_double(path.t_back()) +
             "] -> pinney.csv");
    log.info("pinney: max |equation residual| = " + format_double(std::abs(max_res)) +
             " (five-point readout floors near 1e-6 at solver density)");
    return finish_check(log, effective_tol(sc, o), std::abs(max_res),
                        "auxiliary-equation residual");
}

ScenarioConfig load_scenario_impl(const ConfigFile& c) {
    ScenarioConfig sc;

    const std::string form = c.get("system", "form");
    if (form == "generalized")
        sc.form = ScenarioConfig::Form::Generalized;
    else if (form == "symmetric")
        sc.form = ScenarioConfig::Form::Symmetric;
    else if (form == "traditional")
        sc.form = ScenarioConfig::Form::Traditional;
    else if (form == "rayreid")
        sc.form = ScenarioConfig::Form::RayReid;
    else
        throw ConfigError(
            "system.form must be one of generalized, symmetric, traditional, rayreid (got '" +
            form + "')");

    const std::vector<std::string> state_vars{"t", "x", "y", "xdot", "ydot"};
    switch (sc.form) {
    case ScenarioConfig::Form::Generalized:
        sc.F = parse_key_or(c, "system", "F", {"r"}, "0");
        if (c.has("system", "rho")) sc.rho_expr = parse_key(c, "system", "rho", {"t"});
        if (c.has("system", "Omega0")) sc.Omega0 = c.number("system", "Omega0");
        if (c.has("system", "Omega2")) {
            if (sc.Omega0)
                throw ConfigError(
                    "give either system.Omega2 or system.rho with system.Omega0, not both");
            sc.Omega2 = parse_key(c, "system", "Omega2", state_vars);
        } else if (!sc.rho_expr || !sc.Omega0) {
            throw ConfigError(
                "generalized form needs system.Omega2, or system.rho together with "
                "system.Omega0");
        }
        break;
    case ScenarioConfig::Form::Symmetric:
        sc.F = parse_key_or(c, "system", "F", {"r"}, "0");
        sc.rho_expr = parse_key(c, "system", "rho", {"t"});
        sc.sigma = parse_key(c, "system", "sigma", {"a1", "a2", "b1", "b2"});
        break;
    case ScenarioConfig::Form::Traditional:
        sc.omega = parse_key(c, "system", "omega", {"t"});
        sc.f = parse_key_or(c, "system", "f", {"r"}, "0");
        sc.g = parse_key_or(c, "system", "g", {"rinv"}, "0");
        sc.F = F_from_fg(*sc.f, *sc.g);
        break;
    case ScenarioConfig::Form::RayReid: {
        sc.omega = parse_key(c, "system", "omega", {"t"});
        const bool has_G = c.has("system", "G");
        const bool has_c = c.has("system", "c1") || c.has("system", "c2") ||
                           c.has("system", "c3") || c.has("system", "c4");
        if (has_G && has_c)
            throw ConfigError("give either system.G or the elliptic constants c1..c4, not both");
        if (has_c)
            sc.G = elliptic_G(c.number_or("system", "c1", 0.0), c.number_or("system", "c2", 0.0),
                              c.number_or("system", "c3", 0.0), c.number_or("system", "c4", 0.0));
        else
            sc.G = parse_key_or(c, "system", "G", {"tau"}, "0");
        if (c.has("system", "rho")) {
            if (c.has("system", "rho0") || c.has("system", "rhodot0"))
                throw ConfigError("give either system.rho or system.rho0/rhodot0, not both");
            sc.rho_expr = parse_key(c, "system", "rho", {"t"});
        } else {
            sc.rho0 = c.number_or("system", "rho0", 1.0);
            sc.rhodot0 = c.number_or("system", "rhodot0", 0.0);
        }
        sc.F = parse_expression("0", {"r"});
        break;
    }
    }

    sc.r_ref = c.has("system", "r_ref") ? c.number("system", "r_ref") : default_ref(*sc.F);
    if (sc.G)
        sc.q_ref = c.has("system", "q_ref") ? c.number("system", "q_ref") : default_ref(*sc.G);
    else if (c.has("system", "q_ref"))
        sc.q_ref = c.number("system", "q_ref");

    sc.initial.t = c.number_or("initial", "t", 0.0);
    sc.initial.x = c.number_or("initial", "x", 0.0);
    sc.initial.y = c.number_or("initial", "y", 0.0);
    sc.initial.xdot = c.number_or("initial", "xdot", 0.0);
    sc.initial.ydot = c.number_or("initial", "ydot", 0.0);

    const std::string method = c.get_or("integration", "method", "dp45");
    if (method == "dp45")
        sc.integ.method = IntegratorConfig::Method::DP45;
    else if (method == "rk4")
        sc.integ.method = IntegratorConfig::Method::RK4;
    else
        throw ConfigError("integration.method must be dp45 or rk4 (got '" + method + "')");
    sc.integ.rtol = c.number_or("integration", "rtol", sc.integ.rtol);
    sc.integ.atol = c.number_or("integration", "atol", sc.integ.atol);
    sc.integ.h_init = c.number_or("integration", "h_init", sc.integ.h_init);
    try {
        sc.integ.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("integration settings: ") + e.what());
    }
    sc.t_end = c.number("integration", "t_end");
    if (!(sc.t_end > sc.initial.t))
        throw ConfigError("integration.t_end must exceed initial.t");
    sc.samples = parse_samples(c);
    const std::string svg = c.get_or("integration", "svg", "on");
    if (svg == "on")
        sc.svg = true;
    else if (svg == "off")
        sc.svg = false;
    else
        throw ConfigError("integration.svg must be on or off (got '" + svg + "')");

    if (c.has("check", "tol")) {
        sc.check_tol = c.number("check", "tol");
        if (*sc.check_tol <= 0.0) throw ConfigError("check.tol must be > 0");
    }
    if (c.has("check", "eps")) {
        sc.eps_list = c.number_list("check", "eps");
        if (sc.eps_list.empty()) throw ConfigError("check.eps must list at least one value");
    }

    sc.quasi_C0 = c.number_or("quasi", "C0", 1.0);
    sc.quasi_Cdot0 = c.number_or("quasi", "Cdot0", 0.0);
    sc.pinney_rho0 = c.number_or("pinney", "rho0", 1.0);
    sc.pinney_rhodot0 = c.number_or("pinney", "rhodot0", 0.0);
    if (c.has("pinney", "omega")) sc.pinney_omega = parse_key(c, "pinney", "omega", {"t"});

    const std::vector<std::string> leftovers = c.unused_keys();
    if (!leftovers.empty()) {
        std::string msg = "unrecognized key(s) for this scenario:";
        for (const auto& k : leftovers) msg += " " + k;
        throw ConfigError(msg);
    }
    return sc;
}

} // namespace

ScenarioConfig load_scenario(const ConfigFile& file) { return load_scenario_impl(file); }

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"generalized Ermakov systems: integrate, reduce to quadratures, verify "
                 "invariants and symmetry"};
    app.require_subcommand(1);

    CliOptions o;
    app.add_option("-c,--config", o.config_path, "scenario config file")->required();
    app.add_option("-o,--out", o.out_dir, "output directory (default: current)");
    app.add_option("--tol", o.tol_override, "override the [check] tolerance");
    app.add_flag("-q,--quiet", o.quiet, "suppress summary lines");

    using Handler = int (*)(const ScenarioConfig&, const CliOptions&, const Log&,
                            const fs::path&);
    const std::pair<const char*, const char*> subs[] = {
        {"simulate", "integrate the pair and write the trajectory"},
        {"invariants", "evaluate conserved quantities along a trajectory"},
        {"symmetry", "test the frequency against the invariance structure for rho"},
        {"reduce", "solve by quadrature in group coordinates and map back"},
        {"quasi", "rescale a traditional system to its autonomous form"},
        {"pinney", "solve the auxiliary equation and report residuals"},
        {"compare", "direct integration vs solution by quadrature"},
    };
    std::string chosen;
    for (const auto& [name, desc] : subs) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->fallthrough();
        sub->callback([&chosen, n = std::string(name)] { chosen = n; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (const char* lv = std::getenv("ERMAKOV_LOG")) {
        const std::string v(lv);
        if (v == "quiet") o.quiet = true;
        else if (v == "debug") o.debug = true;
    }
    const Log log{o.quiet, o.debug};

    try {
        fs::create_directories(o.out_dir);
        const ConfigFile file = ConfigFile::parse_file(o.config_path);
        const ScenarioConfig sc = load_scenario(file);
        log.debug("scenario loaded from " + o.config_path);
        const fs::path out(o.out_dir);

        Handler handler = nullptr;
        if (chosen == "simulate") handler = &cmd_simulate;
        else if (chosen == "invariants") handler = &cmd_invariants;
        else if (chosen == "symmetry") handler = &cmd_symmetry;
        else if (chosen == "reduce") handler = &cmd_reduce;
        else if (chosen == "quasi") handler = &cmd_quasi;
        else if (chosen == "pinney") handler = &cmd_pinney;
        else if (chosen == "compare") handler = &cmd_compare;
        if (!handler) throw Error("no subcommand dispatched");
        return handler(sc, o, log, out);
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const CheckError& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace ermakov
