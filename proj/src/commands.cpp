#include "pdmp/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>

#include "json.hpp"

#include "pdmp/asymptotics.hpp"
#include "pdmp/csv.hpp"
#include "pdmp/fpe.hpp"
#include "pdmp/transport.hpp"
#include "pdmp/verify.hpp"

namespace pdmp {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr std::pair<Command, std::string_view> kNames[] = {
    {Command::SolveFpe, "solve-fpe"}, {Command::SimulateMc, "simulate-mc"}, {Command::Stationary, "stationary"},
    {Command::Classify, "classify"},  {Command::Correlate, "correlate"},    {Command::Compare, "compare"},
    {Command::Verify, "verify"},
};

std::string tag(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", t);
    return buf;
}

class Session {
public:
    Session(Command cmd, const RunConfig& cfg, std::ostream* log)
        : run_(resolve(cfg)), log_(log), start_(Clock::now()) {
        manifest_.command = std::string(to_string(cmd));
        manifest_.master_seed = run_.master_seed;
        manifest_.config = echo(cfg, run_);
        manifest_.notes = cfg.notes;
        dir_ = run_.out_dir;
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw Error(ErrorCode::Io, "cannot create " + dir_.string() + ": " + ec.message());
        for (const auto& n : cfg.notes) say("note: " + n);
    }

    const ResolvedRun& run() const { return run_; }
    RunManifest& manifest() { return manifest_; }

    void say(const std::string& line) const {
        if (log_) *log_ << "[" << manifest_.command << "] " << line << "\n";
    }

    void require_paths() const {
        if (run_.n_paths < 1) {
            throw Error(ErrorCode::ConstraintViolation, "mc.n_paths must be at least 1 for " + manifest_.command);
        }
    }

    fs::path path(const std::string& name) {
        manifest_.files.push_back(name);
        return dir_ / name;
    }

    void lap(const std::string& label, Clock::time_point since) {
        manifest_.timings[label] += std::chrono::duration<double>(Clock::now() - since).count();
    }

    void result(const std::string& key, double v) { manifest_.results[key] = format_real(v); }
    void result(const std::string& key, const std::string& v) { manifest_.results[key] = v; }

    template <class G>
    MassRow profile(const std::string& name, const G& grid, const std::vector<std::vector<double>>& states,
                    const std::vector<double>& total, double t) {
        if (!run_.write_csv) return {};
        return write_profile_csv(path(name), grid, states, total, t);
    }

    void masses(const std::vector<MassRow>& rows, const std::string& name = "masses.csv") {
        if (run_.write_csv && !rows.empty()) write_masses_csv(path(name), rows);
    }

    bool plots() const { return run_.write_csv && run_.write_gnuplot; }

    RunManifest finish() {
        manifest_.timings["total"] = std::chrono::duration<double>(Clock::now() - start_).count();
        nlohmann::json j;
        j["command"] = manifest_.command;
        j["version"] = manifest_.version;
        j["master_seed"] = manifest_.master_seed;
        j["config"] = manifest_.config;
        j["files"] = manifest_.files;
        j["timings_seconds"] = manifest_.timings;
        j["shed_mass"] = manifest_.shed_mass;
        j["notes"] = manifest_.notes;
        j["results"] = manifest_.results;
        j["exit_code"] = manifest_.exit_code;
        std::ofstream out(dir_ / "manifest.json");
        out << j.dump(2) << "\n";
        if (!out) throw Error(ErrorCode::Io, "cannot write " + (dir_ / "manifest.json").string());
        return manifest_;
    }

private:
    ResolvedRun run_;
    std::ostream* log_;
    Clock::time_point start_;
    RunManifest manifest_;
    fs::path dir_;
};

Grid2D polar_grid(const ResolvedRun& run) {
    return Grid2D(Grid1D(run.theta_cells, 0.0, 2.0 * std::numbers::pi), run.grid);
}

// Pointwise f_i / kappa at the centers of `grid`, zero outside (0, a).
void write_vstar(Session& s, const StationaryDensity& d, const Grid1D& grid, const std::string& name) {
    std::vector<std::vector<double>> states(2, std::vector<double>(grid.n_cells, 0.0));
    std::vector<double> total(grid.n_cells, 0.0);
    for (std::size_t k = 0; k < grid.n_cells; ++k) {
        const double x = grid.center(k);
        if (x <= 0.0 || x >= d.pair.a) continue;
        for (int i = 0; i < 2; ++i) states[i][k] = d.pair.f(i, x) / d.kappa;
        total[k] = states[0][k] + states[1][k];
    }
    s.profile(name, grid, states, total, 0.0);
}

void solve_fpe(Session& s) {
    const ResolvedRun& run = s.run();
    auto t0 = Clock::now();
    std::vector<PlotSeries> series;
    std::vector<MassRow> rows;
    if (run.spec.is_polar()) {
        const Grid2D grid = polar_grid(run);
        const SolveResult r = solve_moment_polar(run.spec, grid, run.solver);
        s.lap("solve", t0);
        for (const auto& snap : r.snapshots) {
            const std::string name = "fpe_t" + tag(snap.time) + ".csv";
            rows.push_back(s.profile(name, grid, snap.cells, snap.total(), snap.time));
            series.push_back({name, "t = " + tag(snap.time)});
        }
        if (s.plots()) write_gnuplot_2d(s.path("plot.gp"), run.model_name + " (theta, r)", series);
        s.manifest().shed_mass = r.stats.shed_mass;
        s.result("steps", static_cast<double>(r.stats.steps));
        s.result("min_cell", r.stats.min_cell);
    } else {
        const SolveResult r = solve_moment(run.spec, run.grid, run.solver);
        s.lap("solve", t0);
        for (const auto& snap : r.snapshots) {
            const std::string name = "fpe_t" + tag(snap.time) + ".csv";
            rows.push_back(s.profile(name, run.grid, snap.cells, snap.total(), snap.time));
            series.push_back({name, "t = " + tag(snap.time)});
            s.say("t=" + tag(snap.time) + " mass=" + format_real(snap.mass(run.grid.dx())));
        }
        std::string reference;
        t0 = Clock::now();
        try {
            const LargeTimeReport rep = classify(run.spec);
            if (rep.v_star) {
                reference = "vstar.csv";
                write_vstar(s, *rep.v_star, run.grid, reference);
            }
        } catch (const Error& e) {
            s.manifest().notes.push_back(std::string("no stationary reference: ") + e.what());
        }
        s.lap("stationary", t0);
        if (s.plots()) write_gnuplot_1d(s.path("plot.gp"), run.model_name, series, reference);
        s.manifest().shed_mass = r.stats.shed_mass;
        s.result("steps", static_cast<double>(r.stats.steps));
        s.result("dt", r.stats.dt);
        s.result("min_cell", r.stats.min_cell);
        s.result("max_step_budget_error", r.stats.max_step_budget_error);
        if (r.stats.cfl_degenerate) s.manifest().notes.push_back("all velocities vanish; only the chain coupling acts");
    }
    s.masses(rows);
}

void simulate_mc(Session& s) {
    const ResolvedRun& run = s.run();
    s.require_paths();
    std::vector<MassRow> rows;
    std::vector<PlotSeries> series;
    for (double t : run.mc_times) {
        const auto t0 = Clock::now();
        const MCEstimate est = mc_mean(run.spec, run.grid, t, run.n_paths, run.master_seed, run.mc);
        s.lap("monte_carlo", t0);
        const std::string name = "mc_t" + tag(t) + ".csv";
        rows.push_back(s.profile(name, run.grid, est.values, est.total, t));
        s.profile("mc_stderr_t" + tag(t) + ".csv", run.grid, est.std_err, est.total_std_err, t);
        series.push_back({name, "t = " + tag(t)});
        s.result("shed_mass_t" + tag(t), est.shed_mass);
        s.result("max_std_err_t" + tag(t), est.max_std_err());
        for (std::size_t i = 0; i < est.occupancy.size(); ++i) {
            s.result("occupancy_t" + tag(t) + "_state" + std::to_string(i), est.occupancy[i]);
        }
        s.manifest().shed_mass = est.shed_mass;
        s.say("t=" + tag(t) + " paths=" + std::to_string(run.n_paths) + " shed=" + format_real(est.shed_mass));
    }
    s.masses(rows);
    if (s.plots()) write_gnuplot_1d(s.path("plot.gp"), run.model_name + " Monte Carlo", series);
}

void stationary(Session& s) {
    const ResolvedRun& run = s.run();
    const auto t0 = Clock::now();
    std::optional<StationaryDensity> d;
    if (run.spec.is_polar()) {
        d = hopf_radial_vstar(run.spec);
    } else {
        const double a = support_endpoint(run.spec);
        if (!(a > 0.0)) throw Error(ErrorCode::NotIntegrable, "no positive stationary point inside the domain");
        const double x0 = run.x0.value_or(0.5 * a);
        const KappaResult k = kappa_and_vstar(stationary_pair(run.spec, x0, a, Grid1D(run.grid.n_cells, 0.0, a)));
        if (!k.finite) throw Error(ErrorCode::NotIntegrable, "kappa = int (f0 + f1) diverges");
        d = k.v_star;
        s.result("vstar_integral", k.v_star_integral);
    }
    s.lap("stationary", t0);
    s.result("kappa", d->kappa);
    s.result("a", d->pair.a);
    s.result("x0", d->pair.x0);
    s.say("kappa=" + format_real(d->kappa) + " a=" + format_real(d->pair.a));
    write_vstar(s, *d, Grid1D(run.grid.n_cells, 0.0, d->pair.a), "vstar.csv");
    if (s.plots()) write_gnuplot_1d(s.path("plot.gp"), run.model_name + " stationary density", {{"vstar.csv", "V*"}});
}

void classify_cmd(Session& s) {
    const ResolvedRun& run = s.run();
    const auto t0 = Clock::now();
    const LargeTimeReport r = classify(run.spec);
    s.lap("classify", t0);
    std::ofstream out(s.path("report.txt"));
    out << "model = " << run.model_name << "\n"
        << "lambda = " << r.lambda_exact << "\n"
        << "lambda_value = " << format_real(r.lambda) << "\n"
        << "verdict = " << to_string(r.verdict) << "\n"
        << "support_endpoint = " << format_real(r.a) << "\n"
        << "kappa = " << format_real(r.kappa) << "\n";
    for (const auto& n : r.notes) out << "note = " << n << "\n";
    for (const auto& n : s.manifest().notes) out << "note = " << n << "\n";
    if (!out) throw Error(ErrorCode::Io, "cannot write report.txt");
    s.result("lambda", r.lambda_exact);
    s.result("lambda_value", r.lambda);
    s.result("verdict", std::string(to_string(r.verdict)));
    s.result("kappa", r.kappa);
    s.manifest().notes.insert(s.manifest().notes.end(), r.notes.begin(), r.notes.end());
    s.say("lambda=" + r.lambda_exact + " verdict=" + std::string(to_string(r.verdict)));
    if (r.v_star && !run.spec.is_polar()) write_vstar(s, *r.v_star, run.grid, "vstar.csv");
}

void correlate(Session& s) {
    const ResolvedRun& run = s.run();
    if (run.spec.is_polar()) throw Error(ErrorCode::ConstraintViolation, "correlations need an interval domain");
    const Grid1D axis(run.cells_2d, run.grid.lo, run.grid.hi);
    const Grid2D grid(axis, axis);
    const auto t0 = Clock::now();
    const SolveResult r = solve_correlation(run.spec, grid, run.solver, correlation_initial_state(run.spec, grid));
    s.lap("solve", t0);
    std::vector<MassRow> rows;
    std::vector<PlotSeries> series;
    for (const auto& snap : r.snapshots) {
        const std::string name = "corr_t" + tag(snap.time) + ".csv";
        rows.push_back(s.profile(name, grid, snap.cells, snap.total(), snap.time));
        series.push_back({name, "t = " + tag(snap.time)});
    }
    s.masses(rows);
    if (s.plots()) write_gnuplot_2d(s.path("plot.gp"), run.model_name + " correlation", series);
    s.manifest().shed_mass = r.stats.shed_mass;
    s.result("steps", static_cast<double>(r.stats.steps));
    s.result("min_cell", r.stats.min_cell);
}

void compare(Session& s) {
    const ResolvedRun& run = s.run();
    s.require_paths();
    SolverConfig cfg = run.solver;
    cfg.snapshot_times = run.mc_times;
    std::sort(cfg.snapshot_times.begin(), cfg.snapshot_times.end());
    cfg.t_end = cfg.snapshot_times.back();
    auto t0 = Clock::now();
    const SolveResult fpe = solve_moment(run.spec, run.grid, cfg);
    s.lap("solve", t0);

    std::vector<std::vector<std::string>> table;
    std::vector<PlotSeries> series;
    bool ok = true;
    for (const auto& snap : fpe.snapshots) {
        t0 = Clock::now();
        const MCEstimate est = mc_mean(run.spec, run.grid, snap.time, run.n_paths, run.master_seed, run.mc);
        s.lap("monte_carlo", t0);
        const double d = l1_distance(est.total, snap.total(), run.grid.dx());
        const bool pass = d <= run.compare_tolerance;
        ok = ok && pass;
        table.push_back({format_real(snap.time), format_real(d), format_real(run.compare_tolerance),
                         format_real(est.max_std_err()), format_real(est.shed_mass), pass ? "1" : "0"});
        s.profile("fpe_t" + tag(snap.time) + ".csv", run.grid, snap.cells, snap.total(), snap.time);
        s.profile("mc_t" + tag(snap.time) + ".csv", run.grid, est.values, est.total, snap.time);
        series.push_back({"fpe_t" + tag(snap.time) + ".csv", "t = " + tag(snap.time)});
        s.result("l1_t" + tag(snap.time), d);
        s.manifest().shed_mass = est.shed_mass;
        s.say("t=" + tag(snap.time) + " L1=" + format_real(d) + (pass ? " ok" : " exceeds tolerance"));
    }
    if (run.write_csv) {
        write_table_csv(s.path("compare.csv"), {"t", "l1", "tolerance", "max_std_err", "shed_mass", "passed"}, table);
    }
    if (s.plots()) write_gnuplot_1d(s.path("plot.gp"), run.model_name + " moment solver", series);
    if (!ok) s.manifest().exit_code = kExitVerification;
}

void verify(Session& s) {
    const ResolvedRun& run = s.run();
    s.require_paths();
    const auto t0 = Clock::now();
    const auto outcomes = run_verification({run.n_paths, run.master_seed, run.mc.workers}, [&](const CheckOutcome& c) {
        s.say(std::string(c.passed ? "PASS " : "FAIL ") + std::to_string(c.id) + " " + c.name + ": " + c.detail);
    });
    s.lap("verify", t0);
    std::vector<std::vector<std::string>> table;
    bool ok = true;
    std::ofstream detail(s.path("verify.txt"));
    for (const auto& c : outcomes) {
        ok = ok && c.passed;
        table.push_back({std::to_string(c.id), c.name, c.passed ? "pass" : "fail"});
        detail << c.id << " " << (c.passed ? "PASS" : "FAIL") << " " << c.name << ": " << c.detail << "\n";
        s.result("check" + std::to_string(c.id), c.passed ? "pass" : "fail");
        s.manifest().timings["check" + std::to_string(c.id)] = c.seconds;
    }
    write_table_csv(s.path("verify.csv"), {"id", "check", "outcome"}, table);
    if (!ok) s.manifest().exit_code = kExitVerification;
}

}  // namespace

std::string_view to_string(Command c) {
    for (const auto& [cmd, name] : kNames) {
        if (cmd == c) return name;
    }
    return "unknown";
}

std::optional<Command> parse_command(std::string_view name) {
    for (const auto& [cmd, n] : kNames) {
        if (n == name) return cmd;
    }
    return std::nullopt;
}

std::vector<std::string> command_names() {
    std::vector<std::string> out;
    for (const auto& [cmd, name] : kNames) out.emplace_back(name);
    return out;
}

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingParam:
        case ErrorCode::ConstraintViolation:
        case ErrorCode::OutOfDomain:
        case ErrorCode::NotTwoState:
        case ErrorCode::ParseError:
        case ErrorCode::UnknownKey:
        case ErrorCode::Io:
            return kExitConfig;
        default:
            return kExitNumerical;
    }
}

RunManifest run_command(Command cmd, const RunConfig& cfg, std::ostream* log) {
    Session s(cmd, cfg, log);
    switch (cmd) {
        case Command::SolveFpe: solve_fpe(s); break;
        case Command::SimulateMc: simulate_mc(s); break;
        case Command::Stationary: stationary(s); break;
        case Command::Classify: classify_cmd(s); break;
        case Command::Correlate: correlate(s); break;
        case Command::Compare: compare(s); break;
        case Command::Verify: verify(s); break;
    }
    return s.finish();
}

}  // namespace pdmp
