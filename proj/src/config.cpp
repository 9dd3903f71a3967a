#include "pdmp/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#include "pdmp/csv.hpp"
#include "pdmp/presets.hpp"

namespace pdmp {

namespace {

enum class Kind { Real, Count, Seed, RealList, Text, Choice };

struct KeyType {
    Kind kind;
    std::vector<std::string> choices;
};

const std::map<std::string, KeyType>& fixed_keys() {
    static const std::map<std::string, KeyType> keys = [] {
        std::map<std::string, KeyType> k;
        k["model.builtin"] = {Kind::Text, {}};
        for (const char* p : {"q0", "q1", "beta0", "beta1", "c", "mu", "gamma0", "gamma1", "n", "alpha0", "alpha1",
                              "omega0", "omega1", "mu0", "mu1", "b", "x_lo", "x_hi", "initial_state"}) {
            k[std::string("model.") + p] = {Kind::Real, {}};
        }
        k["model.g.kind"] = {Kind::Choice, {"bump", "gaussian"}};
        for (const char* p : {"center", "width", "theta_center", "theta_width"}) {
            k[std::string("model.g.") + p] = {Kind::Real, {}};
        }
        k["model.states"] = {Kind::Count, {}};
        k["model.domain.kind"] = {Kind::Choice, {"interval", "polar"}};
        k["model.domain.lo"] = {Kind::Real, {}};
        k["model.domain.hi"] = {Kind::Real, {}};

        k["grid.n_cells"] = {Kind::Count, {}};
        k["grid.lo"] = {Kind::Real, {}};
        k["grid.hi"] = {Kind::Real, {}};
        k["grid.cells_2d"] = {Kind::Count, {}};
        k["grid.theta_cells"] = {Kind::Count, {}};

        k["solver.cfl"] = {Kind::Real, {}};
        k["solver.t_end"] = {Kind::Real, {}};
        k["solver.snapshot_times"] = {Kind::RealList, {}};
        k["solver.boundary"] = {Kind::Choice, {"outflow", "reflecting"}};
        k["solver.lower"] = {Kind::Choice, {"outflow", "reflecting"}};
        k["solver.upper"] = {Kind::Choice, {"outflow", "reflecting"}};
        k["solver.splitting"] = {Kind::Choice, {"lie", "strang"}};

        k["mc.n_paths"] = {Kind::Count, {}};
        k["mc.master_seed"] = {Kind::Seed, {}};
        k["mc.workers"] = {Kind::Count, {}};
        k["mc.base_step"] = {Kind::Real, {}};
        k["mc.block_size"] = {Kind::Count, {}};
        k["mc.times"] = {Kind::RealList, {}};

        k["compare.tolerance"] = {Kind::Real, {}};
        k["analysis.window_lo"] = {Kind::Real, {}};
        k["analysis.window_hi"] = {Kind::Real, {}};
        k["analysis.x0"] = {Kind::Real, {}};

        k["output.directory"] = {Kind::Text, {}};
        k["output.formats"] = {Kind::Text, {}};
        return k;
    }();
    return keys;
}

const std::regex& field_key() {
    static const std::regex re(R"(model\.field\.(\d+)\.(kind|beta|c|mu|gamma|n|alpha|omega|b|coeffs))");
    return re;
}

const std::regex& rate_key() {
    static const std::regex re(R"(model\.q\.(\d+)\.(\d+))");
    return re;
}

std::optional<KeyType> key_type(const std::string& key) {
    const auto& fixed = fixed_keys();
    if (auto it = fixed.find(key); it != fixed.end()) return it->second;
    std::smatch m;
    if (std::regex_match(key, m, field_key())) {
        if (m[2] == "kind") return KeyType{Kind::Choice, {"transcritical", "goodwin", "pitchfork", "hopf", "polynomial"}};
        if (m[2] == "coeffs") return KeyType{Kind::RealList, {}};
        return KeyType{Kind::Real, {}};
    }
    if (std::regex_match(key, rate_key())) return KeyType{Kind::Real, {}};
    return std::nullopt;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::optional<double> to_real(const std::string& s) {
    if (s.empty()) return std::nullopt;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (errno != 0 || end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<std::uint64_t> to_unsigned(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), nullptr, 10);
    if (errno != 0) return std::nullopt;
    return static_cast<std::uint64_t>(v);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(trim(item));
    return out;
}

std::string where(const std::string& origin, int line) {
    return line > 0 ? origin + ":" + std::to_string(line) + ": " : origin + ": ";
}

void check_value(const std::string& key, const std::string& value, const std::string& context) {
    const auto type = key_type(key);
    if (!type) throw Error(ErrorCode::UnknownKey, context + "unknown key '" + key + "'");
    auto bad = [&](const std::string& expect) {
        return Error(ErrorCode::ParseError, context + key + ": expected " + expect + ", got '" + value + "'");
    };
    switch (type->kind) {
        case Kind::Real:
            if (!to_real(value)) throw bad("a real number");
            break;
        case Kind::Count:
        case Kind::Seed:
            if (!to_unsigned(value)) throw bad("a nonnegative integer");
            break;
        case Kind::RealList:
            for (const auto& item : split_list(value)) {
                if (!to_real(item)) throw bad("a comma-separated list of reals");
            }
            break;
        case Kind::Text:
            if (value.empty()) throw bad("a value");
            break;
        case Kind::Choice:
            if (std::find(type->choices.begin(), type->choices.end(), value) == type->choices.end()) {
                std::string list;
                for (const auto& c : type->choices) list += (list.empty() ? "" : "|") + c;
                throw bad(list);
            }
            break;
    }
}

// A preset named by model.builtin becomes the base of the document.
RunConfig expand_preset(RunConfig cfg) {
    auto it = cfg.entries.find("model.builtin");
    if (it == cfg.entries.end() || !is_preset(it->second.value)) return cfg;
    RunConfig base = preset_config(it->second.value);
    cfg.entries.erase(it);
    RunConfig out = merge(std::move(base), cfg);
    out.origin = cfg.origin;
    return out;
}

// ---------------------------------------------------------------------------
// Typed access during resolution
// ---------------------------------------------------------------------------

class Reader {
public:
    explicit Reader(const RunConfig& cfg) : cfg_(cfg) {}

    bool has(const std::string& key) const { return cfg_.has(key); }

    std::string context(const std::string& key) const {
        auto it = cfg_.entries.find(key);
        return where(cfg_.origin, it == cfg_.entries.end() ? 0 : it->second.line) + key;
    }

    const std::string& text(const std::string& key) const { return cfg_.entries.at(key).value; }
    std::string text(const std::string& key, const std::string& fallback) const {
        return has(key) ? text(key) : fallback;
    }
    double real(const std::string& key) const {
        if (!has(key)) throw Error(ErrorCode::MissingParam, where(cfg_.origin, 0) + key);
        return *to_real(text(key));
    }
    double real(const std::string& key, double fallback) const { return has(key) ? real(key) : fallback; }
    std::uint64_t count(const std::string& key, std::uint64_t fallback) const {
        return has(key) ? *to_unsigned(text(key)) : fallback;
    }
    std::vector<double> list(const std::string& key) const {
        std::vector<double> out;
        for (const auto& item : split_list(text(key))) out.push_back(*to_real(item));
        return out;
    }

private:
    const RunConfig& cfg_;
};

Boundary boundary_of(const std::string& s) { return s == "reflecting" ? Boundary::Reflecting : Boundary::Outflow; }

const std::map<std::string, BuiltinModel>& builtin_names() {
    static const std::map<std::string, BuiltinModel> names{{"transcritical", BuiltinModel::Transcritical},
                                                           {"goodwin", BuiltinModel::Goodwin},
                                                           {"pitchfork", BuiltinModel::Pitchfork},
                                                           {"hopf", BuiltinModel::Hopf}};
    return names;
}

std::set<std::string> builtin_params(BuiltinModel m) {
    std::set<std::string> p{"q0", "q1", "x_lo", "x_hi", "initial_state"};
    switch (m) {
        case BuiltinModel::Transcritical: p.insert({"beta0", "beta1", "c", "mu"}); break;
        case BuiltinModel::Goodwin: p.insert({"gamma0", "gamma1", "n"}); break;
        case BuiltinModel::Pitchfork: p.insert({"alpha0", "alpha1"}); break;
        case BuiltinModel::Hopf: p.insert({"omega0", "omega1", "mu0", "mu1", "b"}); break;
    }
    return p;
}

ModelSpec builtin_model(const Reader& in, const RunConfig& cfg, std::string& name) {
    name = in.text("model.builtin");
    auto it = builtin_names().find(name);
    if (it == builtin_names().end()) {
        throw Error(ErrorCode::ConstraintViolation,
                    in.context("model.builtin") + ": unknown builtin '" + name +
                        "' (expected transcritical, goodwin, pitchfork, hopf or a preset name)");
    }
    const BuiltinModel model = it->second;
    const std::set<std::string> allowed = builtin_params(model);

    ParamMap params;
    for (const auto& [key, entry] : cfg.entries) {
        if (key.rfind("model.", 0) != 0 || key == "model.builtin" || key.rfind("model.g.", 0) == 0) continue;
        const std::string p = key.substr(6);
        if (!allowed.count(p)) {
            throw Error(ErrorCode::ConstraintViolation, in.context(key) + ": does not apply to builtin " + name);
        }
        params[p] = *to_real(entry.value);
    }
    if (in.has("model.g.center")) params["g_center"] = in.real("model.g.center");
    if (in.has("model.g.width")) params["g_width"] = in.real("model.g.width");
    if (in.has("model.g.theta_center")) params["theta_center"] = in.real("model.g.theta_center");
    if (in.has("model.g.theta_width")) params["theta_width"] = in.real("model.g.theta_width");

    ModelSpec spec = build_builtin(model, params);
    if (in.text("model.g.kind", "bump") == "gaussian") {
        InitialDensity radial = InitialDensity::truncated_gaussian(in.real("model.g.center"), in.real("model.g.width"),
                                                                   spec.domain.lo, spec.domain.hi);
        spec.g = spec.is_polar() ? InitialDensity::product(spec.g.angular(), std::move(radial)) : std::move(radial);
    }
    return spec;
}

ModelSpec explicit_model(const Reader& in, const RunConfig& cfg) {
    const auto n = static_cast<std::size_t>(in.count("model.states", 0));
    if (n < 1) throw Error(ErrorCode::ConstraintViolation, in.context("model.states") + ": must be at least 1");

    ModelSpec spec;
    for (std::size_t i = 0; i < n; ++i) {
        const std::string pre = "model.field." + std::to_string(i) + ".";
        if (!in.has(pre + "kind")) throw Error(ErrorCode::MissingParam, in.context(pre + "kind"));
        const std::string kind = in.text(pre + "kind");
        VectorField f;
        if (kind == "transcritical") {
            f.params = Transcritical{in.real(pre + "beta"), in.real(pre + "c"), in.real(pre + "mu")};
        } else if (kind == "goodwin") {
            const double nd = in.real(pre + "n", 2.0);
            if (nd != std::floor(nd)) throw Error(ErrorCode::ConstraintViolation, in.context(pre + "n") + ": integer");
            f.params = Goodwin{in.real(pre + "gamma"), static_cast<int>(nd)};
        } else if (kind == "pitchfork") {
            f.params = Pitchfork{in.real(pre + "alpha")};
        } else if (kind == "hopf") {
            f.params = HopfPolar{in.real(pre + "omega"), in.real(pre + "mu"), in.real(pre + "b", 0.0)};
        } else {
            if (!in.has(pre + "coeffs")) throw Error(ErrorCode::MissingParam, in.context(pre + "coeffs"));
            f.params = Polynomial{in.list(pre + "coeffs")};
        }
        spec.fields.push_back(std::move(f));
    }
    for (const auto& [key, entry] : cfg.entries) {
        std::smatch m;
        if (std::regex_match(key, m, field_key()) && std::stoul(m[1]) >= n) {
            throw Error(ErrorCode::ConstraintViolation, in.context(key) + ": state index out of range");
        }
    }

    std::vector<std::vector<double>> rates(n, std::vector<double>(n, 0.0));
    for (const auto& [key, entry] : cfg.entries) {
        std::smatch m;
        if (!std::regex_match(key, m, rate_key())) continue;
        const std::size_t i = std::stoul(m[1]);
        const std::size_t j = std::stoul(m[2]);
        if (i >= n || j >= n || i == j) {
            throw Error(ErrorCode::ConstraintViolation, in.context(key) + ": needs distinct state indices below " +
                                                            std::to_string(n));
        }
        rates[i][j] = *to_real(entry.value);
    }
    spec.chain = SwitchingChain::from_rates(rates);

    const bool polar = in.text("model.domain.kind", "interval") == "polar";
    const double lo = in.real("model.domain.lo", 0.0);
    const double hi = in.real("model.domain.hi");
    spec.domain = polar ? Domain::polar_annulus(lo, hi) : Domain::interval(lo, hi);

    const double center = in.real("model.g.center", 0.5 * (lo + hi));
    const double width = in.real("model.g.width", 0.5 * (hi - lo));
    InitialDensity radial = in.text("model.g.kind", "bump") == "gaussian"
                                ? InitialDensity::truncated_gaussian(center, width, lo, hi)
                                : InitialDensity::smooth_bump(center, width, lo, hi);
    if (polar) {
        spec.g = InitialDensity::product(
            InitialDensity::smooth_bump(in.real("model.g.theta_center", std::numbers::pi),
                                        in.real("model.g.theta_width", 2.0), 0.0, 2.0 * std::numbers::pi),
            std::move(radial));
    } else {
        spec.g = std::move(radial);
    }
    const double l = in.real("model.initial_state", 0.0);
    if (l < 0.0 || l != std::floor(l)) {
        throw Error(ErrorCode::ConstraintViolation, in.context("model.initial_state") + ": must be a state index");
    }
    spec.initial_state = static_cast<std::size_t>(l);
    require_valid(spec);
    return spec;
}

std::string format_list(const std::vector<double>& v) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t k = 0; k < v.size(); ++k) out << (k ? "," : "") << v[k];
    return out.str();
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value, int line) {
    check_value(key, value, where(origin, line));
    entries[key] = {value, line};
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    cfg.origin = origin;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string content = trim(raw);
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::ParseError, where(origin, line) + "expected 'key = value', got '" + content + "'");
        }
        const std::string key = trim(content.substr(0, eq));
        const std::string value = trim(content.substr(eq + 1));
        if (key.empty()) throw Error(ErrorCode::ParseError, where(origin, line) + "missing key");
        if (cfg.has(key)) {
            throw Error(ErrorCode::ParseError, where(origin, line) + "duplicate key '" + key + "' (first on line " +
                                                   std::to_string(cfg.entries[key].line) + ")");
        }
        cfg.set(key, value, line);
    }
    if (cfg.entries.empty()) throw Error(ErrorCode::ParseError, origin + ": no assignments");
    return expand_preset(std::move(cfg));
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot read config " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str(), path);
}

RunConfig merge(RunConfig base, const RunConfig& overrides) {
    for (const auto& [key, entry] : overrides.entries) base.entries[key] = entry;
    base.notes.insert(base.notes.end(), overrides.notes.begin(), overrides.notes.end());
    if (!overrides.origin.empty()) base.origin = overrides.origin;
    return base;
}

ResolvedRun resolve(const RunConfig& cfg) {
    const Reader in(cfg);
    ResolvedRun run;

    const bool builtin = in.has("model.builtin");
    const bool explicit_fields = in.has("model.states");
    if (builtin == explicit_fields) {
        throw Error(ErrorCode::ConstraintViolation,
                    where(cfg.origin, 0) + "exactly one model source is required (model.builtin or model.states)");
    }
    if (builtin) {
        run.spec = builtin_model(in, cfg, run.model_name);
    } else {
        // Scalar builtin parameters (model.q0, model.beta0, ...) have no meaning here.
        for (const auto& [key, entry] : cfg.entries) {
            const bool scalar = key.rfind("model.", 0) == 0 && key.find('.', 6) == std::string::npos;
            if (scalar && fixed_keys().count(key) && key != "model.states" && key != "model.initial_state") {
                throw Error(ErrorCode::ConstraintViolation, in.context(key) + ": only applies to builtin models");
            }
        }
        run.spec = explicit_model(in, cfg);
        run.model_name = "explicit";
    }

    const Domain& d = run.spec.domain;
    const double grid_lo = in.real("grid.lo", d.lo + 1e-4);
    const double grid_hi = in.real("grid.hi", d.hi);
    if (grid_lo < d.lo || grid_hi > d.hi) {
        throw Error(ErrorCode::ConstraintViolation, in.context("grid.lo") + ": grid must lie inside the domain");
    }
    run.grid = Grid1D(static_cast<std::size_t>(in.count("grid.n_cells", 512)), grid_lo, grid_hi);
    run.cells_2d = static_cast<std::size_t>(in.count("grid.cells_2d", 64));
    run.theta_cells = static_cast<std::size_t>(in.count("grid.theta_cells", 128));
    if (run.cells_2d < 16 || run.theta_cells < 16) {
        throw Error(ErrorCode::ConstraintViolation, in.context("grid.cells_2d") + ": 2D axes need at least 16 cells");
    }

    SolverConfig& s = run.solver;
    s.cfl = in.real("solver.cfl", 0.9);
    if (in.has("solver.snapshot_times")) s.snapshot_times = in.list("solver.snapshot_times");
    s.t_end = in.real("solver.t_end", s.snapshot_times.empty() ? 1.0 : s.snapshot_times.back());
    if (s.snapshot_times.empty()) s.snapshot_times = {s.t_end};
    if (!std::is_sorted(s.snapshot_times.begin(), s.snapshot_times.end()) || s.snapshot_times.front() < 0.0 ||
        s.snapshot_times.back() > s.t_end) {
        throw Error(ErrorCode::ConstraintViolation,
                    in.context("solver.snapshot_times") + ": must be sorted, nonnegative and at most t_end");
    }
    if (!(s.cfl > 0.0 && s.cfl <= 1.0)) throw Error(ErrorCode::ConstraintViolation, in.context("solver.cfl") + ": in (0, 1]");
    const std::string both = in.text("solver.boundary", "outflow");
    s.lower = boundary_of(in.text("solver.lower", both));
    s.upper = boundary_of(in.text("solver.upper", both));
    s.splitting = in.text("solver.splitting", "lie") == "strang" ? Splitting::Strang : Splitting::Lie;

    run.n_paths = static_cast<std::size_t>(in.count("mc.n_paths", 10000));
    run.master_seed = in.count("mc.master_seed", 1);
    run.mc.workers = static_cast<unsigned>(in.count("mc.workers", 0));
    run.mc.block_size = static_cast<std::size_t>(in.count("mc.block_size", 64));
    run.mc.integrator.base_step = in.real("mc.base_step", 0.02);
    if (!(run.mc.integrator.base_step > 0.0)) {
        throw Error(ErrorCode::ConstraintViolation, in.context("mc.base_step") + ": must be positive");
    }
    run.mc_times = in.has("mc.times") ? in.list("mc.times") : s.snapshot_times;
    for (double t : run.mc_times) {
        if (t < 0.0) throw Error(ErrorCode::ConstraintViolation, in.context("mc.times") + ": must be nonnegative");
    }

    run.compare_tolerance = in.real("compare.tolerance", 0.05);
    run.window_lo = in.real("analysis.window_lo", 0.1);
    run.window_hi = in.real("analysis.window_hi", 0.9 * run.grid.hi);
    if (in.has("analysis.x0")) run.x0 = in.real("analysis.x0");

    run.out_dir = in.text("output.directory", "out");
    run.write_csv = false;
    run.write_gnuplot = false;
    for (const auto& f : split_list(in.text("output.formats", "csv,gnuplot"))) {
        if (f == "csv") {
            run.write_csv = true;
        } else if (f == "gnuplot") {
            run.write_gnuplot = true;
        } else {
            throw Error(ErrorCode::ConstraintViolation, in.context("output.formats") + ": unknown format '" + f + "'");
        }
    }
    return run;
}

std::map<std::string, std::string> echo(const RunConfig& cfg, const ResolvedRun& run) {
    std::map<std::string, std::string> out;
    for (const auto& [key, entry] : cfg.entries) out[key] = entry.value;
    out["grid.n_cells"] = std::to_string(run.grid.n_cells);
    out["grid.lo"] = format_real(run.grid.lo);
    out["grid.hi"] = format_real(run.grid.hi);
    out["grid.cells_2d"] = std::to_string(run.cells_2d);
    out["grid.theta_cells"] = std::to_string(run.theta_cells);
    out["solver.cfl"] = format_real(run.solver.cfl);
    out["solver.t_end"] = format_real(run.solver.t_end);
    out["solver.snapshot_times"] = format_list(run.solver.snapshot_times);
    out["solver.lower"] = run.solver.lower == Boundary::Reflecting ? "reflecting" : "outflow";
    out["solver.upper"] = run.solver.upper == Boundary::Reflecting ? "reflecting" : "outflow";
    out["solver.splitting"] = run.solver.splitting == Splitting::Strang ? "strang" : "lie";
    out["mc.n_paths"] = std::to_string(run.n_paths);
    out["mc.master_seed"] = std::to_string(run.master_seed);
    out["mc.base_step"] = format_real(run.mc.integrator.base_step);
    out["mc.block_size"] = std::to_string(run.mc.block_size);
    out["mc.times"] = format_list(run.mc_times);
    out["compare.tolerance"] = format_real(run.compare_tolerance);
    out["analysis.window_lo"] = format_real(run.window_lo);
    out["analysis.window_hi"] = format_real(run.window_hi);
    out["output.directory"] = run.out_dir;
    out.erase("solver.boundary");
    out.erase("mc.workers");
    return out;
}

}  // namespace pdmp
