#include "pdmp/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "pdmp/chain.hpp"
#include "pdmp/quadrature.hpp"

namespace pdmp {

using boost::multiprecision::cpp_rational;

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::AsymptoticallyStable: return "AsymptoticallyStable";
        case Verdict::Sweeping: return "Sweeping";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

namespace {

cpp_rational exact_derivative_at_zero(const VectorField& field) {
    cpp_rational d = std::visit(
        [](const auto& p) -> cpp_rational {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Transcritical>) {
                return cpp_rational(p.beta) - cpp_rational(p.mu);
            } else if constexpr (std::is_same_v<T, Goodwin>) {
                // x^n / (1 + x^n) has slope 1 at 0 for n = 1 and 0 for n > 1.
                return (p.n == 1 ? cpp_rational(1) : cpp_rational(0)) - cpp_rational(p.gamma);
            } else if constexpr (std::is_same_v<T, Pitchfork>) {
                return cpp_rational(p.alpha);
            } else if constexpr (std::is_same_v<T, HopfPolar>) {
                return cpp_rational(p.mu);
            } else {
                return p.coeffs.size() > 1 ? cpp_rational(p.coeffs[1]) : cpp_rational(0);
            }
        },
        field.params);
    if (d == 0) {
        throw Error(ErrorCode::DegenerateDerivative,
                    std::string("b'(0) = 0 for a ") + std::string(to_string(field.family())) + " field");
    }
    return d;
}

void require_two_state(const ModelSpec& spec) {
    if (spec.n_states() != 2 || spec.chain.size() != 2) {
        throw Error(ErrorCode::NotTwoState, "large-time analysis needs exactly two states");
    }
}

// Zeros of b in (0, hi), by sign scan and bisection.
std::vector<double> positive_zeros(const VectorField& f, double hi) {
    constexpr int kScan = 4000;
    std::vector<double> zeros;
    double prev_x = hi * 1e-9;
    double prev_b = eval_field(f, prev_x);
    for (int k = 1; k <= kScan; ++k) {
        const double x = hi * static_cast<double>(k) / kScan;
        const double bx = eval_field(f, x);
        if (bx == 0.0 && k < kScan) {
            zeros.push_back(x);
        } else if ((prev_b < 0.0 && bx > 0.0) || (prev_b > 0.0 && bx < 0.0)) {
            double lo = prev_x;
            double up = x;
            for (int it = 0; it < 200 && up - lo > 0.0; ++it) {
                const double mid = 0.5 * (lo + up);
                if (mid <= lo || mid >= up) break;
                const double bm = eval_field(f, mid);
                if ((bm < 0.0) == (prev_b < 0.0) && bm != 0.0) {
                    lo = mid;
                } else {
                    up = mid;
                }
            }
            zeros.push_back(0.5 * (lo + up));
        }
        prev_x = x;
        prev_b = bx;
    }
    return zeros;
}

const std::array<double, 10>& gl_abscissa() { return boost::math::quadrature::gauss<double, 20>::abscissa(); }
const std::array<double, 10>& gl_weights() { return boost::math::quadrature::gauss<double, 20>::weights(); }

// 20-point Gauss-Legendre on [lo, hi].
template <class F>
double gauss20(F&& f, double lo, double hi) {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double s = 0.0;
    for (std::size_t j = 0; j < gl_abscissa().size(); ++j) {
        const double d = half * gl_abscissa()[j];
        s += gl_weights()[j] * (f(mid - d) + (d > 0.0 ? f(mid + d) : 0.0));
    }
    return half * s;
}

}  // namespace

double derivative_at_zero(const VectorField& field) {
    return static_cast<double>(exact_derivative_at_zero(field));
}

ExactValue lambda_exact(const ModelSpec& spec) {
    require_two_state(spec);
    const cpp_rational q0(spec.chain.rate(0, 1));
    const cpp_rational q1(spec.chain.rate(1, 0));
    if (q0 + q1 <= 0) throw Error(ErrorCode::ConstraintViolation, "q0 + q1 must be positive");
    const cpp_rational lam =
        (q1 * exact_derivative_at_zero(spec.fields[0]) + q0 * exact_derivative_at_zero(spec.fields[1])) / (q0 + q1);

    ExactValue out;
    out.text = lam.str();
    out.sign = lam > 0 ? 1 : (lam < 0 ? -1 : 0);
    out.value = static_cast<double>(lam);
    return out;
}

double lambda(const ModelSpec& spec) { return lambda_exact(spec).value; }

double support_endpoint(const ModelSpec& spec) {
    double a = 0.0;
    for (const auto& f : spec.fields) {
        for (double z : positive_zeros(f, spec.domain.hi)) a = std::max(a, z);
    }
    return a;
}

// ---------------------------------------------------------------------------
// Stationary pair
// ---------------------------------------------------------------------------

double StationaryPair::r(double x) const { return q0 / eval_field(b0, x) + q1 / eval_field(b1, x); }

namespace {

// int_u^v r over u < v inside (0, a). Panels at most double the distance to 0
// below a/2, halve the distance to a above it, and never exceed a/32, so r is
// smooth on each and one 20-point Gauss rule per panel suffices.
double integrate_r(const StationaryPair& p, double u, double v) {
    auto r = [&p](double x) { return p.r(x); };
    const double half = 0.5 * p.a;
    const double cap = p.a / 32.0;
    double s = 0.0;
    double x = u;
    while (x < v) {
        double next = x < half ? std::min(2.0 * x, half) : p.a - 0.5 * (p.a - x);
        next = std::min({next, x + cap, v});
        if (next <= x) next = v;
        s += gauss20(r, x, next);
        x = next;
    }
    return s;
}

// -R at ascending points xs (all inside (0, a)), accumulated from x0.
std::vector<double> log_weights_sorted(const StationaryPair& p, const std::vector<double>& xs) {
    std::vector<double> out(xs.size());
    const auto split = std::lower_bound(xs.begin(), xs.end(), p.x0) - xs.begin();
    double acc = 0.0;
    double prev = p.x0;
    for (auto k = split; k < static_cast<std::ptrdiff_t>(xs.size()); ++k) {
        acc += integrate_r(p, prev, xs[k]);
        prev = xs[k];
        out[k] = -acc;
    }
    acc = 0.0;
    prev = p.x0;
    for (auto k = split; k-- > 0;) {
        acc -= integrate_r(p, xs[k], prev);
        prev = xs[k];
        out[k] = -acc;
    }
    return out;
}

}  // namespace

double StationaryPair::log_weight(double x) const {
    if (x == x0) return 0.0;
    return x > x0 ? -integrate_r(*this, x0, x) : integrate_r(*this, x, x0);
}

double StationaryPair::f(int i, double x) const {
    if (!(x > 0.0 && x < a)) return 0.0;
    const double b = eval_field(i == 0 ? b0 : b1, x);
    return std::exp(log_weight(x)) / std::abs(b);
}

StationaryPair stationary_pair(const ModelSpec& spec, double x0, double a, const Grid1D& grid) {
    require_two_state(spec);
    if (!(a > 0.0) || !(x0 > 0.0 && x0 < a)) {
        throw Error(ErrorCode::ConstraintViolation, "stationary pair needs 0 < x0 < a");
    }
    StationaryPair p;
    p.b0 = spec.fields[0];
    p.b1 = spec.fields[1];
    p.q0 = spec.chain.rate(0, 1);
    p.q1 = spec.chain.rate(1, 0);
    p.x0 = x0;
    p.a = a;
    p.grid = grid;

    constexpr int kProbe = 4000;
    for (int i = 0; i < 2; ++i) {
        const VectorField& f = i == 0 ? p.b0 : p.b1;
        double prev = eval_field(f, a * 1e-6);
        for (int k = 1; k <= kProbe; ++k) {
            const double x = a * (1e-6 + (1.0 - 2e-6) * k / kProbe);
            const double bx = eval_field(f, x);
            if (bx == 0.0 || (bx > 0.0) != (prev > 0.0)) {
                std::ostringstream msg;
                msg << "b" << i << " vanishes near x = " << x << " inside (0, " << a << ")";
                throw Error(ErrorCode::SingularInterior, msg.str());
            }
            prev = bx;
        }
    }

    std::vector<double> inside;
    std::vector<std::size_t> index;
    for (std::size_t k = 0; k < grid.n_cells; ++k) {
        const double x = grid.center(k);
        if (x > 0.0 && x < a) {
            inside.push_back(x);
            index.push_back(k);
        }
    }
    const std::vector<double> lw = log_weights_sorted(p, inside);
    p.f0.assign(grid.n_cells, 0.0);
    p.f1.assign(grid.n_cells, 0.0);
    for (std::size_t j = 0; j < inside.size(); ++j) {
        const double w = std::exp(lw[j]);
        p.f0[index[j]] = w / std::abs(eval_field(p.b0, inside[j]));
        p.f1[index[j]] = w / std::abs(eval_field(p.b1, inside[j]));
    }
    return p;
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

double StationaryDensity::operator()(double x) const { return pair.sum(x) / kappa; }

double StationaryDensity::mass_in(double lo, double hi) const {
    lo = std::max(lo, 0.0);
    hi = std::min(hi, pair.a);
    if (!(hi > lo)) return 0.0;
    // Break [lo, hi] at the graded mesh so each piece sees a smooth integrand.
    std::vector<double> cuts{lo, hi};
    double d = 0.5 * pair.a;
    for (int k = 0; k < kGradedLevels; ++k) {
        for (double c : {d, pair.a - d}) {
            if (c > lo && c < hi) cuts.push_back(c);
        }
        d *= kGradedRatio;
    }
    std::sort(cuts.begin(), cuts.end());
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double u = cuts[k];
        const double v = cuts[k + 1];
        if (!(v > u)) continue;
        // Uniform sub-panels keep each piece below a/64.
        const int m = std::max(1, static_cast<int>(std::ceil((v - u) / (pair.a / 64.0))));
        for (int j = 0; j < m; ++j) {
            s += gauss20(*this, u + (v - u) * j / m, u + (v - u) * (j + 1) / m);
        }
    }
    return s;
}

std::vector<double> StationaryDensity::cell_averages(const Grid1D& grid) const {
    std::vector<double> out(grid.n_cells, 0.0);
    for (std::size_t k = 0; k < grid.n_cells; ++k) {
        out[k] = mass_in(grid.edge(k), grid.edge(k + 1)) / grid.dx();
    }
    return out;
}

KappaResult kappa_and_vstar(const StationaryPair& pair) {
    const GradedNodes nodes = graded_nodes(pair.a, kGradedLevels, kGradedRatio);
    const std::vector<double> lw = log_weights_sorted(pair, nodes.x);
    std::vector<double> values(nodes.x.size());
    for (std::size_t j = 0; j < nodes.x.size(); ++j) {
        const double x = nodes.x[j];
        const double w = std::exp(lw[j]);
        values[j] = w / std::abs(eval_field(pair.b0, x)) + w / std::abs(eval_field(pair.b1, x));
    }
    const GradedIntegral integral = graded_sum(nodes, values);

    KappaResult out;
    out.finite = integral.finite && integral.value > 0.0;
    if (!out.finite) {
        out.kappa = std::numeric_limits<double>::infinity();
        return out;
    }
    out.kappa = integral.value;
    out.v_star = StationaryDensity{pair, out.kappa};
    double s = 0.0;
    for (std::size_t j = 0; j < nodes.x.size(); ++j) s += nodes.w[j] * values[j] / out.kappa;
    out.v_star_integral = s;
    return out;
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

bool fold_condition(double gamma, int n) {
    if (!(gamma > 0.0) || n < 2) throw Error(ErrorCode::ConstraintViolation, "fold condition needs gamma > 0, n > 1");
    const cpp_rational g(gamma);
    cpp_rational lhs = 1;
    for (int k = 0; k < n; ++k) lhs *= g * n;
    cpp_rational rhs = 1;
    for (int k = 0; k < n - 1; ++k) rhs *= n - 1;
    return lhs > rhs;
}

namespace {

// Radial Pitchfork fields with alpha_i = mu_i, on the radial domain.
ModelSpec radial_reduction(const ModelSpec& spec) {
    ModelSpec radial = spec;
    radial.domain = Domain::interval(spec.domain.lo, spec.domain.hi);
    for (auto& f : radial.fields) {
        if (const auto* h = std::get_if<HopfPolar>(&f.params)) f.params = Pitchfork{h->mu};
    }
    return radial;
}

void hormander_check(const ModelSpec& spec, double span, LargeTimeReport& report, bool& ok) {
    constexpr int kProbe = 2000;
    double scale = 0.0;
    double max_diff = 0.0;
    int zeros = 0;
    int near_zero = 0;
    double prev = 0.0;
    for (int k = 1; k < kProbe; ++k) {
        const double x = span * k / kProbe;
        const double b0 = eval_field(spec.fields[0], x);
        const double b1 = eval_field(spec.fields[1], x);
        const double d = b1 - b0;
        scale = std::max({scale, std::abs(b0), std::abs(b1)});
        max_diff = std::max(max_diff, std::abs(d));
        if (d == 0.0) ++near_zero;
        if (k > 1 && ((prev < 0.0 && d > 0.0) || (prev > 0.0 && d < 0.0))) ++zeros;
        prev = d;
    }
    std::ostringstream msg;
    if (max_diff <= 1e-12 * std::max(scale, 1.0) || near_zero > kProbe / 100) {
        ok = false;
        msg << "bracket condition: b1 - b0 vanishes on a set of positive length in (0, " << span << ")";
    } else {
        msg << "bracket condition: b1 - b0 != 0 on (0, " << span << ")";
        if (zeros + near_zero > 0) msg << " except at " << zeros + near_zero << " isolated point(s)";
    }
    report.notes.push_back(msg.str());
}

}  // namespace

LargeTimeReport classify(const ModelSpec& spec) {
    LargeTimeReport report;
    if (spec.n_states() != 2 || spec.chain.size() != 2) {
        report.notes.push_back("not a two-state model; no large-time criterion applies");
        return report;
    }

    const ModelSpec model = spec.is_polar() ? radial_reduction(spec) : spec;
    if (spec.is_polar()) {
        const double w0 = angular_rate(spec.fields[0]);
        const double w1 = angular_rate(spec.fields[1]);
        if (w0 == w1) {
            report.notes.push_back(
                "omega0 == omega1: the angle rotates deterministically, so the mean keeps rotating and has no "
                "stationary limit; the radial part is analysed below");
        } else {
            report.notes.push_back("omega0 != omega1: angular accessibility holds");
        }
    }

    for (const auto& f : model.fields) {
        if (const auto* g = std::get_if<Goodwin>(&f.params)) {
            std::ostringstream msg;
            msg << "fold condition for gamma = " << g->gamma << ", n = " << g->n << ": "
                << (fold_condition(g->gamma, g->n) ? "holds (0 is the only stationary point)" : "fails");
            report.notes.push_back(msg.str());
        }
    }

    try {
        const ExactValue lam = lambda_exact(model);
        report.lambda = lam.value;
        report.lambda_exact = lam.text;
    } catch (const Error& e) {
        report.notes.push_back(std::string("lambda undefined: ") + e.what());
        return report;
    }

    report.a = support_endpoint(model);
    bool hormander_ok = true;
    hormander_check(model, report.a > 0.0 ? report.a : model.domain.hi, report, hormander_ok);
    report.notes.push_back("accessibility from every point of the state space is assumed for builtin fields");
    if (!hormander_ok) {
        report.notes.push_back("bracket condition fails; verdict withheld");
        return report;
    }

    if (report.lambda < 0.0) {
        report.verdict = Verdict::Sweeping;
        report.notes.push_back("lambda < 0: mass is swept from compact subsets; the large-time mean is 0");
        return report;
    }
    if (report.lambda == 0.0) {
        report.notes.push_back("lambda = 0: the criterion does not decide");
        return report;
    }

    if (!(report.a > 0.0)) {
        report.notes.push_back("no positive stationary point bounds the support");
        return report;
    }
    try {
        const StationaryPair pair = stationary_pair(model, 0.5 * report.a, report.a, Grid1D(256, 0.0, report.a));
        KappaResult k = kappa_and_vstar(pair);
        report.kappa = k.kappa;
        if (!k.finite) {
            report.notes.push_back("kappa diverges under graded refinement");
            return report;
        }
        report.v_star = std::move(k.v_star);
    } catch (const Error& e) {
        report.notes.push_back(std::string("stationary pair unavailable: ") + e.what());
        return report;
    }
    if (spec.is_polar() && angular_rate(spec.fields[0]) == angular_rate(spec.fields[1])) {
        report.notes.push_back("radial mean converges to v_star; the full mean does not");
        return report;
    }
    report.verdict = Verdict::AsymptoticallyStable;
    return report;
}

StationaryDensity hopf_radial_vstar(const ModelSpec& spec) {
    if (!spec.is_polar()) throw Error(ErrorCode::ConstraintViolation, "Hopf stationary density needs a polar model");
    const ModelSpec radial = radial_reduction(spec);
    if (lambda_exact(radial).sign <= 0) {
        throw Error(ErrorCode::NegativeLambda, "lambda <= 0: the mean at large time is 0");
    }
    const double a = support_endpoint(radial);
    const StationaryPair pair = stationary_pair(radial, 0.5 * a, a, Grid1D(256, 0.0, a));
    KappaResult k = kappa_and_vstar(pair);
    if (!k.finite) throw Error(ErrorCode::NotIntegrable, "radial kappa diverges");
    return *k.v_star;
}

std::vector<double> hopf_vstar(const ModelSpec& spec, const Grid2D& grid) {
    const StationaryDensity radial = hopf_radial_vstar(spec);
    const std::vector<double> r = radial.cell_averages(grid.y);
    std::vector<double> out(grid.size());
    const double inv = 1.0 / (2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < grid.x.n_cells; ++i) {
        for (std::size_t j = 0; j < grid.y.n_cells; ++j) out[grid.index(i, j)] = inv * r[j];
    }
    return out;
}

SweepingReport sweeping_diagnostic(const std::vector<FieldState>& snapshots, const Grid1D& grid, double lo,
                                   double hi) {
    SweepingReport out;
    for (const auto& s : snapshots) {
        const std::vector<double> v = s.total();
        double m = 0.0;
        if (hi > lo) {
            for (std::size_t k = 0; k < grid.n_cells; ++k) {
                const double overlap = std::min(hi, grid.edge(k + 1)) - std::max(lo, grid.edge(k));
                if (overlap > 0.0) m += v[k] * overlap;
            }
        }
        out.times.push_back(s.time);
        out.masses.push_back(m);
    }
    out.monotone = !out.masses.empty();
    for (std::size_t k = 1; k < out.masses.size(); ++k) {
        if (!(out.masses[k] < out.masses[k - 1])) out.monotone = false;
    }
    out.final_mass = out.masses.empty() ? 0.0 : out.masses.back();
    return out;
}

double closed_form_stationary(const ModelSpec& spec, int i, double x) {
    require_two_state(spec);
    if (i < 0 || i > 1) throw Error(ErrorCode::ConstraintViolation, "state index must be 0 or 1");
    const double q[2] = {spec.chain.rate(0, 1), spec.chain.rate(1, 0)};
    const ModelSpec model = spec.is_polar() ? radial_reduction(spec) : spec;

    const auto* t0 = std::get_if<Transcritical>(&model.fields[0].params);
    const auto* t1 = std::get_if<Transcritical>(&model.fields[1].params);
    if (t0 && t1) {
        // b_k = -c_k x (x - a_k); exp(-R) = prod |x - a_k|^e_k x^-e_k, e_k = q_k / (c_k a_k).
        const Transcritical* t[2] = {t0, t1};
        double log_w = 0.0;
        for (int k = 0; k < 2; ++k) {
            const double ak = (t[k]->beta - t[k]->mu) / t[k]->c;
            const double ek = q[k] / (t[k]->c * ak);
            log_w += ek * (std::log(std::abs(x - ak)) - std::log(x));
        }
        const double ai = (t[i]->beta - t[i]->mu) / t[i]->c;
        return std::exp(log_w) / (t[i]->c * x * std::abs(x - ai));
    }

    const auto* p0 = std::get_if<Pitchfork>(&model.fields[0].params);
    const auto* p1 = std::get_if<Pitchfork>(&model.fields[1].params);
    if (p0 && p1) {
        // b_k = -x (x^2 - alpha_k); exp(-R) = prod |x^2 - alpha_k|^(e_k / 2) x^-e_k, e_k = q_k / alpha_k.
        const double alpha[2] = {p0->alpha, p1->alpha};
        double log_w = 0.0;
        for (int k = 0; k < 2; ++k) {
            const double ek = q[k] / alpha[k];
            log_w += 0.5 * ek * std::log(std::abs(x * x - alpha[k])) - ek * std::log(x);
        }
        return std::exp(log_w) / (x * std::abs(x * x - alpha[i]));
    }
    throw Error(ErrorCode::ConstraintViolation, "closed form exists only for transcritical and pitchfork pairs");
}

}  // namespace pdmp
