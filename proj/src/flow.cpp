#include "pdmp/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pdmp {

namespace {

// sign = +1 integrates x' = b(x); sign = -1 integrates x' = -b(x).
FlowResult integrate(const VectorField& f, const Domain* domain, double x0, double dt, double sign,
                     const IntegratorConfig& cfg) {
    FlowResult out;
    out.endpoint = x0;
    if (!(dt > 0.0)) return out;

    const auto wanted = static_cast<std::size_t>(std::ceil(dt / cfg.base_step));
    const std::size_t steps = std::clamp<std::size_t>(wanted, 1, std::max<std::size_t>(cfg.max_substeps, 1));
    const double h = dt / static_cast<double>(steps);
    const double escape = domain ? 10.0 * domain->hi : 0.0;

    double x = x0;
    double logj = 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
        const double b1 = eval_field(f, x);
        if (std::abs(b1) < cfg.stationary_guard * std::max(1.0, std::abs(x))) {
            logj += sign * h * eval_field_derivative(f, x);
            continue;
        }
        const double k1 = sign * b1;
        const double l1 = sign * eval_field_derivative(f, x);
        const double x2 = x + 0.5 * h * k1;
        const double k2 = sign * eval_field(f, x2);
        const double l2 = sign * eval_field_derivative(f, x2);
        const double x3 = x + 0.5 * h * k2;
        const double k3 = sign * eval_field(f, x3);
        const double l3 = sign * eval_field_derivative(f, x3);
        const double x4 = x + h * k3;
        const double k4 = sign * eval_field(f, x4);
        const double l4 = sign * eval_field_derivative(f, x4);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        logj += h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);

        if (!std::isfinite(x) || !std::isfinite(logj)) {
            // Blow-up in finite time carries the state out of any bounded domain.
            out.status = domain ? FlowStatus::ExitedDomain : FlowStatus::Diverged;
            out.endpoint = x;
            out.log_jacobian = logj;
            return out;
        }
        if (domain && (!domain->contains(x) || std::abs(x) > escape)) {
            out.status = FlowStatus::ExitedDomain;
            out.endpoint = x;
            out.log_jacobian = logj;
            return out;
        }
    }
    out.endpoint = x;
    out.log_jacobian = logj;
    return out;
}

double wrap_angle(double theta) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = std::fmod(theta, two_pi);
    if (w < 0.0) w += two_pi;
    return w;
}

}  // namespace

FlowResult advance(const VectorField& field, double x0, double dt, const IntegratorConfig& cfg) {
    return integrate(field, nullptr, x0, dt, 1.0, cfg);
}

FlowResult advance(const VectorField& field, const Domain& domain, double x0, double dt,
                   const IntegratorConfig& cfg) {
    return integrate(field, &domain, x0, dt, 1.0, cfg);
}

FlowResult backward(const VectorField& field, double x, double dt, const IntegratorConfig& cfg) {
    return integrate(field, nullptr, x, dt, -1.0, cfg);
}

FlowResult backward(const VectorField& field, const Domain& domain, double x, double dt,
                    const IntegratorConfig& cfg) {
    return integrate(field, &domain, x, dt, -1.0, cfg);
}

FlowResult advance_polar(const VectorField& field, const Domain& domain, double theta, double r, double dt,
                         const IntegratorConfig& cfg) {
    FlowResult out = integrate(field, &domain, r, dt, 1.0, cfg);
    out.angle = wrap_angle(theta + angular_rate(field) * dt);
    return out;
}

FlowResult backward_polar(const VectorField& field, const Domain& domain, double theta, double r, double dt,
                          const IntegratorConfig& cfg) {
    FlowResult out = integrate(field, &domain, r, dt, -1.0, cfg);
    out.angle = wrap_angle(theta - angular_rate(field) * dt);
    return out;
}

}  // namespace pdmp
