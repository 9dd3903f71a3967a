#pragma once

#include <cstddef>
#include <optional>

#include "pdmp/model.hpp"

namespace pdmp {

struct IntegratorConfig {
    double base_step = 1e-2;
    std::size_t max_substeps = 1'000'000;
    /// The state is frozen when |b(x)| < stationary_guard * max(1, |x|).
    double stationary_guard = 1e-14;
};

enum class FlowStatus { Ok, ExitedDomain, Diverged };

/// Endpoint of a characteristic together with log d(pi(t, .))/dx along it.
/// For polar fields `endpoint` is the radius and `angle` the wrapped angle.
struct FlowResult {
    double endpoint = 0.0;
    double angle = 0.0;
    double log_jacobian = 0.0;
    FlowStatus status = FlowStatus::Ok;

    bool exited() const { return status == FlowStatus::ExitedDomain; }
    bool ok() const { return status == FlowStatus::Ok; }
};

/// pi(dt, x0) by classical RK4 on x' = b(x), L' = b'(x). Without a domain only
/// non-finite states are reported (as Diverged). With a domain the integration
/// stops as soon as the state leaves (lo, hi) or passes 10 * hi, and the
/// result is flagged ExitedDomain.
FlowResult advance(const VectorField& field, double x0, double dt, const IntegratorConfig& cfg = {});
FlowResult advance(const VectorField& field, const Domain& domain, double x0, double dt,
                   const IntegratorConfig& cfg = {});

/// pi(-dt, x) and log d(pi(-dt, .))/dx = -int b'(x(s)) ds.
FlowResult backward(const VectorField& field, double x, double dt, const IntegratorConfig& cfg = {});
FlowResult backward(const VectorField& field, const Domain& domain, double x, double dt,
                    const IntegratorConfig& cfg = {});

/// Polar fields: theta moves exactly by +-omega * dt (b = 0), r by RK4.
FlowResult advance_polar(const VectorField& field, const Domain& domain, double theta, double r, double dt,
                         const IntegratorConfig& cfg = {});
FlowResult backward_polar(const VectorField& field, const Domain& domain, double theta, double r, double dt,
                          const IntegratorConfig& cfg = {});

}  // namespace pdmp
