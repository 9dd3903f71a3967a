#include "pdmp/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

namespace pdmp {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingParam: return "MissingParam";
        case ErrorCode::ConstraintViolation: return "ConstraintViolation";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::NotTwoState: return "NotTwoState";
        case ErrorCode::Diverged: return "Diverged";
        case ErrorCode::NonFiniteState: return "NonFiniteState";
        case ErrorCode::SizeCap: return "SizeCap";
        case ErrorCode::DegenerateDerivative: return "DegenerateDerivative";
        case ErrorCode::SingularInterior: return "SingularInterior";
        case ErrorCode::NotIntegrable: return "NotIntegrable";
        case ErrorCode::NegativeLambda: return "NegativeLambda";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::UnknownKey: return "UnknownKey";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

namespace {

double ipow(double x, int n) {
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
}

// Composite 20-point Gauss-Legendre with panels no wider than scale / 32.
template <class F>
double integrate(F&& f, double a, double b, double scale) {
    if (!(b > a)) return 0.0;
    using GL = boost::math::quadrature::gauss<double, 20>;
    const auto panels = static_cast<int>(std::ceil((b - a) / (scale / 32.0)));
    const int m = std::max(1, panels);
    double s = 0.0;
    for (int k = 0; k < m; ++k) {
        s += GL::integrate(f, a + (b - a) * k / m, a + (b - a) * (k + 1) / m);
    }
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Vector fields
// ---------------------------------------------------------------------------

double eval_field(const VectorField& f, double x) {
    switch (f.family()) {
        case FieldFamily::Transcritical: {
            const auto& p = std::get<Transcritical>(f.params);
            return (p.beta - p.c * x) * x - p.mu * x;
        }
        case FieldFamily::Goodwin: {
            const auto& p = std::get<Goodwin>(f.params);
            const double xn = ipow(x, p.n);
            return xn / (1.0 + xn) - p.gamma * x;
        }
        case FieldFamily::Pitchfork: {
            const auto& p = std::get<Pitchfork>(f.params);
            return p.alpha * x - x * x * x;
        }
        case FieldFamily::HopfPolar: {
            const auto& p = std::get<HopfPolar>(f.params);
            return p.mu * x - x * x * x;
        }
        case FieldFamily::Polynomial: {
            const auto& c = std::get<Polynomial>(f.params).coeffs;
            double acc = 0.0;
            for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
            return acc;
        }
    }
    return 0.0;
}

double eval_field_derivative(const VectorField& f, double x) {
    switch (f.family()) {
        case FieldFamily::Transcritical: {
            const auto& p = std::get<Transcritical>(f.params);
            return p.beta - p.mu - 2.0 * p.c * x;
        }
        case FieldFamily::Goodwin: {
            const auto& p = std::get<Goodwin>(f.params);
            const double xn = ipow(x, p.n);
            const double den = 1.0 + xn;
            return p.n * ipow(x, p.n - 1) / (den * den) - p.gamma;
        }
        case FieldFamily::Pitchfork: {
            const auto& p = std::get<Pitchfork>(f.params);
            return p.alpha - 3.0 * x * x;
        }
        case FieldFamily::HopfPolar: {
            const auto& p = std::get<HopfPolar>(f.params);
            return p.mu - 3.0 * x * x;
        }
        case FieldFamily::Polynomial: {
            const auto& c = std::get<Polynomial>(f.params).coeffs;
            double acc = 0.0;
            for (std::size_t k = c.size(); k-- > 1;) acc = acc * x + static_cast<double>(k) * c[k];
            return acc;
        }
    }
    return 0.0;
}

double angular_rate(const VectorField& f) {
    if (const auto* p = std::get_if<HopfPolar>(&f.params)) return p->omega;
    return 0.0;
}

std::string_view to_string(FieldFamily family) {
    switch (family) {
        case FieldFamily::Transcritical: return "transcritical";
        case FieldFamily::Goodwin: return "goodwin";
        case FieldFamily::Pitchfork: return "pitchfork";
        case FieldFamily::HopfPolar: return "hopf";
        case FieldFamily::Polynomial: return "polynomial";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Switching chain
// ---------------------------------------------------------------------------

SwitchingChain SwitchingChain::from_rates(const std::vector<std::vector<double>>& rates) {
    SwitchingChain chain;
    chain.n_ = rates.size();
    chain.q_.assign(chain.n_ * chain.n_, 0.0);
    for (std::size_t i = 0; i < chain.n_; ++i) {
        if (rates[i].size() != chain.n_) {
            throw Error(ErrorCode::ConstraintViolation, "intensity matrix must be square");
        }
        double total = 0.0;
        for (std::size_t j = 0; j < chain.n_; ++j) {
            if (j == i) continue;
            chain.q_[i * chain.n_ + j] = rates[i][j];
            total += rates[i][j];
        }
        chain.q_[i * chain.n_ + i] = -total;
    }
    return chain;
}

SwitchingChain SwitchingChain::two_state(double q0, double q1) {
    return from_rates({{0.0, q0}, {q1, 0.0}});
}

SwitchingChain SwitchingChain::from_matrix(const std::vector<std::vector<double>>& q) {
    SwitchingChain chain;
    chain.n_ = q.size();
    chain.q_.reserve(chain.n_ * chain.n_);
    for (const auto& row : q) {
        if (row.size() != chain.n_) {
            throw Error(ErrorCode::ConstraintViolation, "intensity matrix must be square");
        }
        chain.q_.insert(chain.q_.end(), row.begin(), row.end());
    }
    return chain;
}

double SwitchingChain::exit_rate(std::size_t i) const {
    double total = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
        if (j != i) total += rate(i, j);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Initial density
// ---------------------------------------------------------------------------

InitialDensity InitialDensity::grid_samples(double lo, double hi, std::vector<double> values) {
    if (!(hi > lo) || values.empty()) {
        throw Error(ErrorCode::ConstraintViolation, "grid samples need hi > lo and at least one value");
    }
    double sum = 0.0;
    for (double v : values) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw Error(ErrorCode::ConstraintViolation, "grid samples must be finite and nonnegative");
        }
        sum += v;
    }
    const double dx = (hi - lo) / static_cast<double>(values.size());
    if (!(sum > 0.0)) throw Error(ErrorCode::ConstraintViolation, "grid samples have zero mass");
    InitialDensity g;
    g.kind_ = DensityKind::GridSamples;
    g.lo_ = lo;
    g.hi_ = hi;
    g.scale_ = 1.0 / (sum * dx);
    g.samples_ = std::move(values);
    return g;
}

InitialDensity InitialDensity::smooth_bump(double center, double half_width, double lo, double hi) {
    if (!(half_width > 0.0) || !(hi > lo)) {
        throw Error(ErrorCode::ConstraintViolation, "smooth bump needs half_width > 0 and hi > lo");
    }
    InitialDensity g;
    g.kind_ = DensityKind::SmoothBump;
    g.lo_ = lo;
    g.hi_ = hi;
    g.p0_ = center;
    g.p1_ = half_width;
    const double a = std::max(lo, center - half_width);
    const double b = std::min(hi, center + half_width);
    const double mass = integrate([&](double x) { return g.raw(x); }, a, b, half_width);
    if (!(mass > 0.0)) throw Error(ErrorCode::ConstraintViolation, "smooth bump does not meet the domain");
    g.scale_ = 1.0 / mass;
    return g;
}

InitialDensity InitialDensity::truncated_gaussian(double mean, double sd, double lo, double hi) {
    if (!(sd > 0.0) || !(hi > lo)) {
        throw Error(ErrorCode::ConstraintViolation, "truncated gaussian needs sd > 0 and hi > lo");
    }
    InitialDensity g;
    g.kind_ = DensityKind::TruncatedGaussian;
    g.lo_ = lo;
    g.hi_ = hi;
    g.p0_ = mean;
    g.p1_ = sd;
    const double s = sd * std::numbers::sqrt2;
    const double mass = 0.5 * sd * std::sqrt(2.0 * std::numbers::pi) *
                        (std::erf((hi - mean) / s) - std::erf((lo - mean) / s));
    if (!(mass > 0.0)) throw Error(ErrorCode::ConstraintViolation, "truncated gaussian has no mass in the domain");
    g.scale_ = 1.0 / mass;
    return g;
}

InitialDensity InitialDensity::product(InitialDensity angular, InitialDensity radial) {
    InitialDensity g;
    g.kind_ = DensityKind::ProductOfMarginals;
    g.lo_ = radial.lo();
    g.hi_ = radial.hi();
    g.marginals_.push_back(std::move(angular));
    g.marginals_.push_back(std::move(radial));
    return g;
}

double InitialDensity::raw(double x) const {
    switch (kind_) {
        case DensityKind::SmoothBump: {
            const double z = (x - p0_) / p1_;
            if (std::abs(z) >= 1.0) return 0.0;
            return std::exp(-1.0 / (1.0 - z * z));
        }
        case DensityKind::TruncatedGaussian: {
            const double z = (x - p0_) / p1_;
            return std::exp(-0.5 * z * z);
        }
        case DensityKind::GridSamples: {
            const double dx = (hi_ - lo_) / static_cast<double>(samples_.size());
            auto k = static_cast<std::size_t>((x - lo_) / dx);
            k = std::min(k, samples_.size() - 1);
            return samples_[k];
        }
        case DensityKind::ProductOfMarginals:
            return 0.0;
    }
    return 0.0;
}

double InitialDensity::operator()(double x) const {
    if (kind_ == DensityKind::ProductOfMarginals) {
        throw Error(ErrorCode::ConstraintViolation, "product density needs (theta, r)");
    }
    if (x < lo_ || x > hi_) return 0.0;
    return scale_ * raw(x);
}

double InitialDensity::operator()(double theta, double r) const {
    if (kind_ != DensityKind::ProductOfMarginals) return (*this)(r);
    const double two_pi = 2.0 * std::numbers::pi;
    double wrapped = std::fmod(theta, two_pi);
    if (wrapped < 0.0) wrapped += two_pi;
    return marginals_[0](wrapped) * marginals_[1](r);
}

double InitialDensity::cell_average(double a, double b) const {
    if (!(b > a)) return 0.0;
    if (kind_ == DensityKind::ProductOfMarginals) return radial().cell_average(a, b);
    const double lo = std::max(a, lo_);
    const double hi = std::min(b, hi_);
    if (!(hi > lo)) return 0.0;
    if (kind_ == DensityKind::GridSamples) {
        // Exact: sum of overlaps with the piecewise-constant cells.
        const double dx = (hi_ - lo_) / static_cast<double>(samples_.size());
        double acc = 0.0;
        for (std::size_t k = 0; k < samples_.size(); ++k) {
            const double cl = std::max(lo, lo_ + dx * static_cast<double>(k));
            const double cr = std::min(hi, lo_ + dx * static_cast<double>(k + 1));
            if (cr > cl) acc += samples_[k] * (cr - cl);
        }
        return scale_ * acc / (b - a);
    }
    double s = lo;
    double e = hi;
    if (kind_ == DensityKind::SmoothBump) {
        s = std::max(s, p0_ - p1_);
        e = std::min(e, p0_ + p1_);
        if (!(e > s)) return 0.0;
    }
    return scale_ * integrate([&](double x) { return raw(x); }, s, e, p1_) / (b - a);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

std::string_view to_string(DiagnosticCode code) {
    switch (code) {
        case DiagnosticCode::FieldCountMismatch: return "FieldCountMismatch";
        case DiagnosticCode::InitialStateOutOfRange: return "InitialStateOutOfRange";
        case DiagnosticCode::NegativeRate: return "NegativeRate";
        case DiagnosticCode::RowSumNonzero: return "RowSumNonzero";
        case DiagnosticCode::AbsorbingState: return "AbsorbingState";
        case DiagnosticCode::DomainInvalid: return "DomainInvalid";
        case DiagnosticCode::DomainKindMismatch: return "DomainKindMismatch";
        case DiagnosticCode::TranscriticalParam: return "TranscriticalParam";
        case DiagnosticCode::GoodwinParam: return "GoodwinParam";
        case DiagnosticCode::HopfBNonzero: return "HopfBNonzero";
        case DiagnosticCode::PolynomialDegree: return "PolynomialDegree";
        case DiagnosticCode::NonFiniteField: return "NonFiniteField";
        case DiagnosticCode::DensityInvalid: return "DensityInvalid";
    }
    return "Unknown";
}

std::vector<Diagnostic> validate(const ModelSpec& spec) {
    std::vector<Diagnostic> out;
    auto add = [&](DiagnosticCode code, std::string msg) { out.push_back({code, std::move(msg)}); };

    const std::size_t n = spec.chain.size();
    if (spec.fields.size() != n || n == 0) {
        add(DiagnosticCode::FieldCountMismatch,
            "fields: " + std::to_string(spec.fields.size()) + ", chain states: " + std::to_string(n));
    }
    if (spec.initial_state >= n) {
        add(DiagnosticCode::InitialStateOutOfRange, "initial state " + std::to_string(spec.initial_state));
    }

    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        double scale = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double q = spec.chain.rate(i, j);
            row += q;
            scale = std::max(scale, std::abs(q));
            if (j != i && !(q >= 0.0)) {
                add(DiagnosticCode::NegativeRate,
                    "q[" + std::to_string(i) + "][" + std::to_string(j) + "] = " + std::to_string(q));
            }
        }
        if (std::abs(row) > 1e-12 * std::max(1.0, scale)) {
            add(DiagnosticCode::RowSumNonzero, "row " + std::to_string(i) + " sums to " + std::to_string(row));
        }
        if (!(spec.chain.exit_rate(i) > 0.0)) {
            add(DiagnosticCode::AbsorbingState, "state " + std::to_string(i) + " has zero exit rate");
        }
    }

    const Domain& d = spec.domain;
    if (!(d.hi > d.lo) || !(d.lo >= 0.0) || !std::isfinite(d.hi)) {
        add(DiagnosticCode::DomainInvalid, "domain needs 0 <= lo < hi < inf");
    }

    for (std::size_t i = 0; i < spec.fields.size(); ++i) {
        const auto& f = spec.fields[i];
        const std::string tag = "field " + std::to_string(i);
        if (f.is_polar() != spec.is_polar()) {
            add(DiagnosticCode::DomainKindMismatch, tag + " does not match the domain kind");
        }
        if (const auto* p = std::get_if<Transcritical>(&f.params)) {
            if (!(p->c > 0.0) || !(p->mu > 0.0)) add(DiagnosticCode::TranscriticalParam, tag + " needs c > 0 and mu > 0");
        } else if (const auto* p = std::get_if<Goodwin>(&f.params)) {
            if (!(p->gamma > 0.0) || p->n <= 1) add(DiagnosticCode::GoodwinParam, tag + " needs gamma > 0 and n > 1");
        } else if (const auto* p = std::get_if<HopfPolar>(&f.params)) {
            if (p->b != 0.0) add(DiagnosticCode::HopfBNonzero, tag + " has b != 0");
        } else if (const auto* p = std::get_if<Polynomial>(&f.params)) {
            if (p->coeffs.size() > kMaxPolynomialDegree + 1) {
                add(DiagnosticCode::PolynomialDegree, tag + " exceeds degree 6");
            }
        }
        if (d.hi > d.lo) {
            for (int k = 1; k < 16; ++k) {
                const double x = d.lo + (d.hi - d.lo) * k / 16.0;
                if (!std::isfinite(eval_field(f, x)) || !std::isfinite(eval_field_derivative(f, x))) {
                    add(DiagnosticCode::NonFiniteField, tag + " is not finite at x = " + std::to_string(x));
                    break;
                }
            }
        }
    }

    if (spec.g.kind() != DensityKind::ProductOfMarginals && spec.is_polar()) {
        add(DiagnosticCode::DensityInvalid, "polar domain needs a product initial density");
    }
    return out;
}

void require_valid(const ModelSpec& spec) {
    const auto diags = validate(spec);
    if (diags.empty()) return;
    std::ostringstream msg;
    for (std::size_t k = 0; k < diags.size(); ++k) {
        if (k) msg << "; ";
        msg << to_string(diags[k].code) << " (" << diags[k].message << ")";
    }
    throw Error(ErrorCode::ConstraintViolation, msg.str());
}

// ---------------------------------------------------------------------------
// Builtins
// ---------------------------------------------------------------------------

std::string_view to_string(BuiltinModel model) {
    switch (model) {
        case BuiltinModel::Transcritical: return "transcritical";
        case BuiltinModel::Goodwin: return "goodwin";
        case BuiltinModel::Pitchfork: return "pitchfork";
        case BuiltinModel::Hopf: return "hopf";
    }
    return "unknown";
}

namespace {

double require(const ParamMap& params, const std::string& key) {
    auto it = params.find(key);
    if (it == params.end()) throw Error(ErrorCode::MissingParam, key);
    return it->second;
}

double optional(const ParamMap& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

// Largest positive root of x^(n-1) / (1 + x^n) = gamma, or 0 if none.
double goodwin_largest_root(double gamma, int n) {
    auto h = [&](double x) { return ipow(x, n - 1) / (1.0 + ipow(x, n)) - gamma; };
    const double peak = std::pow(static_cast<double>(n - 1), 1.0 / n);
    if (h(peak) <= 0.0) return 0.0;
    double lo = peak;
    double hi = 2.0 * peak + 1.0;
    while (h(hi) > 0.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

ModelSpec build_builtin(BuiltinModel model, const ParamMap& params) {
    ModelSpec spec;
    const double q0 = require(params, "q0");
    const double q1 = require(params, "q1");
    if (!(q0 > 0.0) || !(q1 > 0.0)) throw Error(ErrorCode::ConstraintViolation, "q0 and q1 must be positive");
    spec.chain = SwitchingChain::two_state(q0, q1);

    double largest = 0.0;
    switch (model) {
        case BuiltinModel::Transcritical: {
            const double c = require(params, "c");
            const double mu = require(params, "mu");
            for (const char* key : {"beta0", "beta1"}) {
                const double beta = require(params, key);
                spec.fields.push_back({Transcritical{beta, c, mu}});
                if (c > 0.0) largest = std::max(largest, (beta - mu) / c);
            }
            break;
        }
        case BuiltinModel::Goodwin: {
            const double nd = optional(params, "n", 2.0);
            if (nd != std::floor(nd)) throw Error(ErrorCode::ConstraintViolation, "goodwin n must be an integer");
            const int n = static_cast<int>(nd);
            if (n <= 1) throw Error(ErrorCode::ConstraintViolation, "goodwin needs n > 1");
            for (const char* key : {"gamma0", "gamma1"}) {
                const double gamma = require(params, key);
                if (!(gamma > 0.0)) throw Error(ErrorCode::ConstraintViolation, "goodwin needs gamma > 0");
                spec.fields.push_back({Goodwin{gamma, n}});
                largest = std::max(largest, goodwin_largest_root(gamma, n));
            }
            break;
        }
        case BuiltinModel::Pitchfork: {
            for (const char* key : {"alpha0", "alpha1"}) {
                const double alpha = require(params, key);
                spec.fields.push_back({Pitchfork{alpha}});
                if (alpha > 0.0) largest = std::max(largest, std::sqrt(alpha));
            }
            break;
        }
        case BuiltinModel::Hopf: {
            const double b = optional(params, "b", 0.0);
            for (int i = 0; i < 2; ++i) {
                const double omega = require(params, "omega" + std::to_string(i));
                const double mu = require(params, "mu" + std::to_string(i));
                spec.fields.push_back({HopfPolar{omega, mu, b}});
                if (mu > 0.0) largest = std::max(largest, std::sqrt(mu));
            }
            break;
        }
    }

    const double x_lo = optional(params, "x_lo", 0.0);
    double x_hi = optional(params, "x_hi", 1.5 * largest);
    if (!(x_hi > x_lo)) {
        throw Error(ErrorCode::MissingParam, "x_hi (no positive stationary point to derive a default from)");
    }
    spec.domain = model == BuiltinModel::Hopf ? Domain::polar_annulus(x_lo, x_hi) : Domain::interval(x_lo, x_hi);

    // Default initial density: a smooth bump filling (0, span), span being the
    // largest positive stationary point.
    const double span = largest > 0.0 ? largest : x_hi / 1.5;
    const double center = optional(params, "g_center", 0.5 * span);
    const double width = optional(params, "g_width", 0.5 * span);
    InitialDensity radial = InitialDensity::smooth_bump(center, width, x_lo, x_hi);
    if (model == BuiltinModel::Hopf) {
        const double two_pi = 2.0 * std::numbers::pi;
        const double tc = optional(params, "theta_center", std::numbers::pi);
        const double tw = optional(params, "theta_width", 2.0);
        spec.g = InitialDensity::product(InitialDensity::smooth_bump(tc, tw, 0.0, two_pi), std::move(radial));
    } else {
        spec.g = std::move(radial);
    }

    const double l = optional(params, "initial_state", 0.0);
    if (l < 0.0 || l != std::floor(l)) throw Error(ErrorCode::ConstraintViolation, "initial_state must be a state index");
    spec.initial_state = static_cast<std::size_t>(l);

    require_valid(spec);
    return spec;
}

}  // namespace pdmp
