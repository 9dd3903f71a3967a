#include "pdmp/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "pdmp/asymptotics.hpp"
#include "pdmp/chain.hpp"
#include "pdmp/config.hpp"
#include "pdmp/csv.hpp"
#include "pdmp/flow.hpp"
#include "pdmp/fpe.hpp"
#include "pdmp/presets.hpp"
#include "pdmp/transport.hpp"

namespace pdmp {

double l1_distance(const std::vector<double>& a, const std::vector<double>& b, double dx) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
    return s * dx;
}

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

ResolvedRun preset(const std::string& name) { return resolve(preset_config(name)); }

SolverConfig snapshots_at(std::vector<double> times) {
    SolverConfig cfg;
    cfg.snapshot_times = std::move(times);
    cfg.t_end = cfg.snapshot_times.back();
    return cfg;
}

struct Context {
    VerifyOptions opts;
    ResolvedRun fig1;
    std::vector<double> mc_times{0.25, 1.0, 2.5};
    std::vector<MCEstimate> fig1_mc;
    double fig1_mc_seconds = 0.0;
};

CheckOutcome moment_equivalence(Context& ctx) {
    CheckOutcome out{1, "Monte Carlo mean matches the moment solver (fig1)", true, {}, 0.0};
    const ResolvedRun& run = ctx.fig1;
    const auto start = Clock::now();
    MCOptions mc = run.mc;
    mc.workers = ctx.opts.workers;
    for (double t : ctx.mc_times) {
        ctx.fig1_mc.push_back(mc_mean(run.spec, run.grid, t, ctx.opts.n_paths, ctx.opts.master_seed, mc));
    }
    ctx.fig1_mc_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    const SolveResult fpe = solve_moment(run.spec, run.grid, snapshots_at(ctx.mc_times));
    for (std::size_t k = 0; k < ctx.mc_times.size(); ++k) {
        const double d = l1_distance(ctx.fig1_mc[k].total, fpe.snapshots[k].total(), run.grid.dx());
        out.detail += "t=" + num(ctx.mc_times[k]) + " L1=" + num(d) + "; ";
        out.passed = out.passed && d <= 0.05;
    }
    out.detail += "mc " + num(ctx.fig1_mc_seconds) + " s";
    out.passed = out.passed && ctx.fig1_mc_seconds <= 120.0;
    return out;
}

CheckOutcome growth_rates(Context&) {
    CheckOutcome out{2, "growth-rate sign and verdict per preset", true, {}, 0.0};
    struct Expect {
        const char* name;
        const char* lambda;
        Verdict verdict;
    };
    const Expect cases[] = {{"fig1", "7/8", Verdict::AsymptoticallyStable},
                            {"fig2a", "-1/4", Verdict::Sweeping},
                            {"fig3", "1/2", Verdict::AsymptoticallyStable}};
    for (const auto& c : cases) {
        const LargeTimeReport r = classify(preset(c.name).spec);
        const bool ok = r.lambda_exact == c.lambda && r.verdict == c.verdict;
        out.detail += std::string(c.name) + ": lambda=" + r.lambda_exact + " " + std::string(to_string(r.verdict)) + "; ";
        out.passed = out.passed && ok;
    }
    const RunConfig fig2c = preset_config("fig2c");
    const LargeTimeReport r = classify(resolve(fig2c).spec);
    out.detail += "fig2c: lambda=" + r.lambda_exact + (fig2c.notes.empty() ? " (unflagged)" : " (flagged)");
    out.passed = out.passed && r.lambda_exact == "1/2" && !fig2c.notes.empty();
    return out;
}

CheckOutcome stationary_closed_forms(Context&) {
    CheckOutcome out{3, "stationary densities match their closed forms", true, {}, 0.0};
    boost::math::quadrature::tanh_sinh<double> ts;
    for (const char* name : {"fig1", "fig3"}) {
        const ModelSpec spec = preset(name).spec;
        const double a = support_endpoint(spec);
        const KappaResult k = kappa_and_vstar(stationary_pair(spec, 0.5 * a, a, Grid1D(1024, 0.0, a)));
        if (!k.finite) {
            out.passed = false;
            out.detail += std::string(name) + ": kappa diverged; ";
            continue;
        }
        auto closed = [&](double x) {
            return closed_form_stationary(spec, 0, x) + closed_form_stationary(spec, 1, x);
        };
        const double norm = ts.integrate(closed, 0.0, a);
        double worst = 0.0;
        const Grid1D grid(1024, 0.0, a);
        for (std::size_t c = 0; c < grid.n_cells; ++c) {
            const double x = grid.center(c);
            if (x < 0.05 * a || x > 0.95 * a) continue;
            const double ref = closed(x) / norm;
            worst = std::max(worst, std::abs((*k.v_star)(x) - ref) / ref);
        }
        const double mass = k.v_star->mass_in(0.0, a);
        const bool ok = worst <= 1e-6 && std::abs(k.v_star_integral - 1.0) <= 1e-6 && std::abs(mass - 1.0) <= 1e-6;
        out.detail += std::string(name) + ": rel=" + num(worst) + " kappa=" + num(k.kappa) +
                      " mass-1=" + num(mass - 1.0) + "; ";
        out.passed = out.passed && ok;
    }
    return out;
}

CheckOutcome convergence(Context&) {
    CheckOutcome out{4, "moment solution approaches the stationary density", true, {}, 0.0};
    struct Case {
        const char* name;
        double t;
        double bound;
    };
    for (const Case c : {Case{"fig1", 2.5, 0.05}, Case{"fig3", 10.0, 0.1}}) {
        ResolvedRun run = preset(c.name);
        const Grid1D grid(1024, run.grid.lo, run.grid.hi);
        const SolveResult r = solve_moment(run.spec, grid, snapshots_at({c.t}));
        const LargeTimeReport rep = classify(run.spec);
        if (!rep.v_star) {
            out.passed = false;
            out.detail += std::string(c.name) + ": no stationary density; ";
            continue;
        }
        const double d = l1_distance(r.snapshots.back().total(), rep.v_star->cell_averages(grid), grid.dx());
        out.detail += std::string(c.name) + " t=" + num(c.t) + " L1=" + num(d) + "; ";
        out.passed = out.passed && d <= c.bound;
    }
    return out;
}

CheckOutcome sweeping(Context&) {
    CheckOutcome out{5, "window mass decays on the sweeping presets", true, {}, 0.0};
    for (const char* name : {"fig2a", "fig2b"}) {
        const ResolvedRun run = preset(name);
        const SolveResult r = solve_moment(run.spec, run.grid, snapshots_at({0.25, 1.0, 5.0}));
        const SweepingReport s = sweeping_diagnostic(r.snapshots, run.grid, 0.1, 0.9 * run.grid.hi);
        out.detail += std::string(name) + ":";
        for (double m : s.masses) out.detail += " " + num(m);
        out.detail += "; ";
        out.passed = out.passed && s.monotone && s.final_mass < 0.2;
    }
    return out;
}

CheckOutcome mass_identities(Context& ctx) {
    CheckOutcome out{6, "per-state masses follow the chain", true, {}, 0.0};
    ModelSpec frozen;
    frozen.fields = {VectorField{Polynomial{{0.0}}}, VectorField{Polynomial{{0.0}}}};
    frozen.chain = ctx.fig1.spec.chain;
    frozen.domain = Domain::interval(0.0, 1.0);
    frozen.g = InitialDensity::smooth_bump(0.5, 0.25, 0.0, 1.0);
    const Grid1D grid(256, 0.0, 1.0);
    const double m0 = moment_initial_state(frozen, grid).mass(grid.dx());
    const SolveResult r = solve_moment(frozen, grid, snapshots_at(ctx.mc_times));
    double worst = 0.0;
    for (const auto& snap : r.snapshots) {
        const OccupationVector p = occupation_probabilities(frozen.chain, 0, snap.time);
        for (std::size_t i = 0; i < 2; ++i) worst = std::max(worst, std::abs(snap.state_mass(i, grid.dx()) - p.probs[i] * m0));
    }
    out.detail = "frozen fields: max err=" + num(worst) + "; ";
    out.passed = worst <= 1e-8;

    if (ctx.fig1_mc.size() != ctx.mc_times.size()) {
        out.detail += "fig1 Monte Carlo estimates unavailable";
        out.passed = false;
        return out;
    }
    double worst_z = 0.0;
    for (const auto& est : ctx.fig1_mc) {
        const OccupationVector p = occupation_probabilities(ctx.fig1.spec.chain, ctx.fig1.spec.initial_state, est.t);
        for (std::size_t i = 0; i < 2; ++i) {
            worst_z = std::max(worst_z, std::abs(est.state_mass[i] - p.probs[i]) / est.state_mass_std_err[i]);
        }
    }
    out.detail += "fig1 Monte Carlo: max |z|=" + num(worst_z);
    out.passed = out.passed && worst_z <= 4.0;
    return out;
}

CheckOutcome correlations(Context& ctx) {
    CheckOutcome out{7, "correlation system consistency (fig1, 64x64)", true, {}, 0.0};
    const ResolvedRun& run = ctx.fig1;
    const Grid1D axis(64, run.grid.lo, run.grid.hi);
    const Grid2D grid(axis, axis);

    const SolveResult c = solve_correlation(run.spec, grid, snapshots_at({0.5}), correlation_initial_state(run.spec, grid));
    const SolveResult v = solve_moment(run.spec, axis, snapshots_at({0.5}));
    double worst = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        std::vector<double> marginal(axis.n_cells, 0.0);
        for (std::size_t x = 0; x < axis.n_cells; ++x) {
            for (std::size_t y = 0; y < axis.n_cells; ++y) marginal[x] += c.snapshots.back().cells[i][grid.index(x, y)];
            marginal[x] *= axis.dx();
        }
        worst = std::max(worst, l1_distance(marginal, v.snapshots.back().cells[i], axis.dx()));
    }
    out.detail = "marginal L1=" + num(worst) + "; ";
    out.passed = worst <= 0.05;

    MCOptions mc = run.mc;
    mc.workers = ctx.opts.workers;
    const MCEstimate est = mc_correlation(run.spec, grid, 0.5, 500, ctx.opts.master_seed, mc);
    bool symmetric = true;
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t x = 0; x < axis.n_cells; ++x) {
            for (std::size_t y = 0; y < axis.n_cells; ++y) {
                symmetric = symmetric && est.values[i][grid.index(x, y)] == est.values[i][grid.index(y, x)];
            }
        }
    }
    out.detail += symmetric ? "Monte Carlo symmetric; " : "Monte Carlo asymmetric; ";
    out.passed = out.passed && symmetric;

    double gap = 0.0;
    for (const auto& field : run.spec.fields) {
        const SparseMatrix a = advection_matrix(field, axis, Boundary::Outflow, Boundary::Outflow);
        const SparseMatrix diff =
            advection_matrix_2d(field, grid, Boundary::Outflow, Boundary::Outflow) - kronecker_sum(a, a);
        for (int k = 0; k < diff.outerSize(); ++k) {
            for (SparseMatrix::InnerIterator it(diff, k); it; ++it) gap = std::max(gap, std::abs(it.value()));
        }
    }
    out.detail += "generator vs Kronecker sum max-abs=" + num(gap);
    out.passed = out.passed && gap == 0.0;
    return out;
}

CheckOutcome hygiene(Context&) {
    CheckOutcome out{8, "scheme positivity, conservation, integrator order, Jacobians", true, {}, 0.0};
    double min_cell = 0.0;
    for (const std::string& name : preset_names()) {
        const ResolvedRun run = preset(name);
        SolveResult r;
        if (run.spec.is_polar()) {
            const Grid2D grid(Grid1D(run.theta_cells, 0.0, 2.0 * std::numbers::pi), run.grid);
            r = solve_moment_polar(run.spec, grid, run.solver);
        } else {
            r = solve_moment(run.spec, run.grid, run.solver);
        }
        min_cell = std::min(min_cell, r.stats.min_cell);
    }
    out.detail = "min cell=" + num(min_cell) + "; ";
    out.passed = min_cell >= 0.0;

    ResolvedRun fig1 = preset("fig1");
    SolverConfig closed = fig1.solver;
    closed.lower = closed.upper = Boundary::Reflecting;
    const double drift = solve_moment(fig1.spec, fig1.grid, closed).stats.max_step_mass_change;
    out.detail += "reflecting drift/step=" + num(drift) + "; ";
    out.passed = out.passed && drift <= 1e-12;

    const VectorField pitch{Pitchfork{1.0}};
    const double x0 = 0.1;
    const double t = 2.0;
    const double exact = x0 * std::exp(t) / std::sqrt(1.0 + x0 * x0 * (std::exp(2.0 * t) - 1.0));
    double err[3];
    const double steps[3] = {0.2, 0.1, 0.05};
    for (int k = 0; k < 3; ++k) err[k] = std::abs(advance(pitch, x0, t, {.base_step = steps[k]}).endpoint - exact);
    const double r1 = err[0] / err[1];
    const double r2 = err[1] / err[2];
    out.detail += "RK4 ratios " + num(r1) + ", " + num(r2) + "; ";
    out.passed = out.passed && r1 > 12.0 && r1 < 20.0 && r2 > 12.0 && r2 < 20.0;

    double jac = 0.0;
    int probes = 0;
    for (const char* name : {"fig1", "fig2b", "fig3"}) {
        const ModelSpec spec = preset(name).spec;
        for (const auto& field : spec.fields) {
            for (double x : {0.2, 0.5, 0.8}) {
                const double h = 1e-6;
                const FlowResult up = backward(field, spec.domain, x + h, 0.7);
                const FlowResult down = backward(field, spec.domain, x - h, 0.7);
                const FlowResult mid = backward(field, spec.domain, x, 0.7);
                if (!up.ok() || !down.ok() || !mid.ok()) continue;
                const double fd = (up.endpoint - down.endpoint) / (2.0 * h);
                jac = std::max(jac, std::abs(std::exp(mid.log_jacobian) - fd));
                ++probes;
            }
        }
    }
    out.detail += "Jacobian vs FD=" + num(jac) + " over " + std::to_string(probes) + " points";
    out.passed = out.passed && probes >= 12 && jac <= 1e-5;
    return out;
}

CheckOutcome determinism(Context& ctx) {
    CheckOutcome out{9, "reruns are byte-identical across worker counts", true, {}, 0.0};
    const ResolvedRun& run = ctx.fig1;
    std::string text[2];
    const unsigned workers[2] = {1, 3};
    for (int k = 0; k < 2; ++k) {
        MCOptions mc = run.mc;
        mc.workers = workers[k];
        const MCEstimate est = mc_mean(run.spec, run.grid, 1.0, 1000, ctx.opts.master_seed, mc);
        text[k] = profile_csv_text(run.grid, est.values, est.total) + profile_csv_text(run.grid, est.std_err, est.total_std_err);
        const SolveResult fpe = solve_moment(run.spec, run.grid, run.solver);
        for (const auto& s : fpe.snapshots) text[k] += profile_csv_text(run.grid, s.cells, s.total());
    }
    out.passed = text[0] == text[1];
    out.detail = out.passed ? "identical payloads" : "payloads differ";
    return out;
}

}  // namespace

std::vector<CheckOutcome> run_verification(const VerifyOptions& opts,
                                           const std::function<void(const CheckOutcome&)>& progress) {
    Context ctx{opts, preset("fig1"), {0.25, 1.0, 2.5}, {}, 0.0};
    using Check = CheckOutcome (*)(Context&);
    const Check checks[] = {moment_equivalence, growth_rates, stationary_closed_forms, convergence, sweeping,
                            mass_identities,    correlations, hygiene,                 determinism};
    std::vector<CheckOutcome> out;
    for (Check check : checks) {
        const auto start = Clock::now();
        CheckOutcome r;
        try {
            r = check(ctx);
        } catch (const Error& e) {
            r = {static_cast<int>(out.size()) + 1, "check aborted", false, e.what(), 0.0};
        }
        r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        if (progress) progress(r);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace pdmp
