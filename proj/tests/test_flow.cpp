#include <catch_amalgamated.hpp>

#include <cmath>

#include "pdmp/flow.hpp"

using namespace pdmp;
using Catch::Approx;

namespace {

double pitchfork_exact(double x0, double t) {
    return x0 * std::exp(t) / std::sqrt(1.0 + x0 * x0 * (std::exp(2.0 * t) - 1.0));
}

}  // namespace

TEST_CASE("linear field") {
    const VectorField lin{Polynomial{{0.0, 1.0}}};
    const FlowResult r = advance(lin, 0.5, 1.0);
    CHECK(r.endpoint == Approx(0.5 * std::exp(1.0)).epsilon(1e-9));
    CHECK(r.log_jacobian == Approx(1.0).epsilon(1e-12));

    const FlowResult back = backward(lin, r.endpoint, 1.0);
    CHECK(back.endpoint == Approx(0.5).margin(1e-10));
    CHECK(r.log_jacobian + back.log_jacobian == Approx(0.0).margin(1e-10));
}

TEST_CASE("stationary points stay put") {
    const VectorField t1{Transcritical{4.0, 2.0, 2.0}};
    const FlowResult r = advance(t1, 1.0, 3.0);
    CHECK(r.endpoint == 1.0);
    CHECK(r.ok());
}

TEST_CASE("pitchfork flow matches its closed form") {
    const VectorField p{Pitchfork{1.0}};
    CHECK(advance(p, 0.5, 2.0).endpoint == Approx(pitchfork_exact(0.5, 2.0)).margin(1e-8));
}

TEST_CASE("classical RK4 converges at fourth order") {
    const VectorField p{Pitchfork{1.0}};
    const double exact = pitchfork_exact(0.1, 2.0);
    double prev = 0.0;
    for (double h : {0.4, 0.2, 0.1, 0.05}) {
        const double err = std::abs(advance(p, 0.1, 2.0, {.base_step = h}).endpoint - exact);
        if (prev > 0.0) CHECK(prev / err == Approx(16.0).margin(3.0));
        prev = err;
    }
}

TEST_CASE("backward flow near a stable point") {
    const VectorField b1{Transcritical{4.0, 2.0, 2.0}};
    const Domain d = Domain::interval(0.0, 1.5);
    const FlowResult r = backward(b1, d, 0.95, 0.5);
    CHECK(r.ok());
    CHECK(r.endpoint < 0.95);
    CHECK(r.log_jacobian > 0.0);

    const FlowResult above = backward(b1, d, 1.4, 2.0);
    CHECK(above.exited());
}

TEST_CASE("backward blow-up is reported as exit") {
    const VectorField p{Pitchfork{-0.5}};
    const FlowResult r = backward(p, Domain::interval(0.0, 1.5), 0.8, 5.0);
    CHECK(r.exited());
}

TEST_CASE("group property on builtin fields") {
    const std::vector<VectorField> fields{VectorField{Transcritical{1.0, 2.0, 2.0}}, VectorField{Transcritical{4.0, 2.0, 2.0}},
                                          VectorField{Goodwin{2.0, 2}},              VectorField{Goodwin{0.25, 2}},
                                          VectorField{Pitchfork{-0.5}},              VectorField{Pitchfork{1.0}}};
    for (const auto& f : fields) {
        for (double x : {0.1, 0.6}) {
            for (double s : {0.3, 1.0}) {
                for (double t : {0.2, 0.9}) {
                    const double two = advance(f, advance(f, x, s).endpoint, t).endpoint;
                    CHECK(two == Approx(advance(f, x, s + t).endpoint).margin(1e-8));
                }
            }
        }
    }
}

TEST_CASE("Jacobian agrees with central differences") {
    const std::vector<VectorField> fields{VectorField{Transcritical{4.0, 2.0, 2.0}}, VectorField{Goodwin{0.25, 2}},
                                          VectorField{Pitchfork{1.0}}};
    const double h = 1e-5;
    for (const auto& f : fields) {
        for (double x : {0.2, 0.5, 0.8}) {
            const double fd = (advance(f, x + h, 0.8).endpoint - advance(f, x - h, 0.8).endpoint) / (2 * h);
            CHECK(std::exp(advance(f, x, 0.8).log_jacobian) == Approx(fd).margin(1e-5));
        }
    }
}

TEST_CASE("volume-preserving field has zero log Jacobian") {
    const VectorField c{Polynomial{{0.7}}};
    const FlowResult r = advance(c, 0.1, 1.0);
    CHECK(r.endpoint == Approx(0.8));
    CHECK(r.log_jacobian == 0.0);
}

TEST_CASE("polar flow rotates the angle exactly") {
    const VectorField h{HopfPolar{2.0, 1.0, 0.0}};
    const Domain d = Domain::polar_annulus(0.0, 1.5);
    const FlowResult r = advance_polar(h, d, 0.5, 0.3, 1.0);
    CHECK(r.angle == Approx(2.5).margin(1e-14));
    CHECK(r.endpoint == Approx(pitchfork_exact(0.3, 1.0)).margin(1e-8));
    const FlowResult back = backward_polar(h, d, r.angle, r.endpoint, 1.0);
    CHECK(back.angle == Approx(0.5).margin(1e-12));
    CHECK(back.endpoint == Approx(0.3).margin(1e-9));
}
