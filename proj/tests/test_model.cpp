#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "pdmp/model.hpp"

using namespace pdmp;
using Catch::Approx;

namespace {

ModelSpec transcritical_fig1() {
    return build_builtin(BuiltinModel::Transcritical,
                         {{"q0", 5}, {"q1", 3}, {"beta0", 1}, {"beta1", 4}, {"c", 2}, {"mu", 2}});
}

bool has_code(const std::vector<Diagnostic>& d, DiagnosticCode c) {
    for (const auto& x : d) {
        if (x.code == c) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("transcritical builtin wires the two birth-death fields") {
    const ModelSpec s = transcritical_fig1();
    REQUIRE(s.n_states() == 2);
    for (double x : {0.1, 0.37, 0.9}) {
        CHECK(eval_field(s.fields[0], x) == Approx((1 - 2 * x) * x - 2 * x).epsilon(1e-14));
        CHECK(eval_field(s.fields[1], x) == Approx((4 - 2 * x) * x - 2 * x).epsilon(1e-14));
    }
    CHECK(eval_field_derivative(s.fields[0], 0.0) == Approx(-1.0));
    CHECK(eval_field_derivative(s.fields[1], 0.0) == Approx(2.0));
    CHECK(s.chain.rate(0, 1) == 5.0);
    CHECK(s.chain.rate(1, 0) == 3.0);
    CHECK(validate(s).empty());
}

TEST_CASE("transcritical fields vanish at 0 and at (beta - mu) / c") {
    const VectorField f{Transcritical{4.0, 2.0, 2.0}};
    CHECK(eval_field(f, 0.0) == 0.0);
    CHECK(eval_field(f, 1.0) == 0.0);
}

TEST_CASE("pitchfork and goodwin builtins") {
    const ModelSpec p = build_builtin(BuiltinModel::Pitchfork, {{"q0", 4}, {"q1", 2}, {"alpha0", -0.5}, {"alpha1", 1}});
    CHECK(eval_field(p.fields[0], 0.3) == Approx(-0.5 * 0.3 - 0.027).epsilon(1e-14));
    CHECK(eval_field(p.fields[1], 1.0) == 0.0);

    const ModelSpec g =
        build_builtin(BuiltinModel::Goodwin, {{"q0", 6}, {"q1", 2}, {"gamma0", 2}, {"gamma1", 0.25}, {"n", 2}});
    CHECK(validate(g).empty());
    CHECK(eval_field_derivative(g.fields[0], 0.0) == Approx(-2.0));
    // x^2 / (1 + x^2) - 2x = -2x + x^2 + O(x^4)
    const double x = 1e-3;
    CHECK(eval_field(g.fields[0], x) == Approx(-2 * x + x * x).epsilon(1e-9));
}

TEST_CASE("builtin parameter errors") {
    CHECK_THROWS_MATCHES(build_builtin(BuiltinModel::Transcritical, {{"q0", 5}, {"q1", 3}, {"beta0", 1}}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::MissingParam;
                         }));
    CHECK_THROWS_MATCHES(
        build_builtin(BuiltinModel::Goodwin, {{"q0", 6}, {"q1", 2}, {"gamma0", 2}, {"gamma1", 0.25}, {"n", 1}}), Error,
        Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::ConstraintViolation; }));
}

TEST_CASE("validate names each violated invariant") {
    ModelSpec s = transcritical_fig1();
    s.chain = SwitchingChain::from_matrix({{-5.0, 5.1}, {3.0, -3.0}});
    CHECK(has_code(validate(s), DiagnosticCode::RowSumNonzero));

    ModelSpec h = build_builtin(BuiltinModel::Hopf,
                                {{"q0", 4}, {"q1", 2}, {"mu0", -0.5}, {"mu1", 1}, {"omega0", 1}, {"omega1", 2}});
    CHECK(validate(h).empty());
    h.fields[0] = VectorField{HopfPolar{1.0, -0.5, 0.3}};
    CHECK(has_code(validate(h), DiagnosticCode::HopfBNonzero));

    ModelSpec absorbing = transcritical_fig1();
    absorbing.chain = SwitchingChain::from_rates({{0.0, 1.0}, {0.0, 0.0}});
    CHECK(has_code(validate(absorbing), DiagnosticCode::AbsorbingState));

    ModelSpec wrong_state = transcritical_fig1();
    wrong_state.initial_state = 2;
    CHECK(has_code(validate(wrong_state), DiagnosticCode::InitialStateOutOfRange));
}

TEST_CASE("derivatives agree with central differences at second order") {
    const std::vector<VectorField> fields{
        VectorField{Transcritical{4.0, 2.0, 2.0}}, VectorField{Goodwin{0.25, 2}}, VectorField{Goodwin{2.0, 3}},
        VectorField{Pitchfork{-0.5}},              VectorField{HopfPolar{1.0, 1.0, 0.0}},
        VectorField{Polynomial{{0.1, -1.0, 0.5, 0.0, 0.0, 0.0, -0.2}}}};
    for (const auto& f : fields) {
        for (double x : {0.2, 0.55, 1.3}) {
            const double exact = eval_field_derivative(f, x);
            double err[2];
            const double hs[2] = {1e-3, 5e-4};
            for (int k = 0; k < 2; ++k) {
                const double h = hs[k];
                err[k] = std::abs((eval_field(f, x + h) - eval_field(f, x - h)) / (2 * h) - exact);
            }
            CHECK(err[1] <= 1e-6 * std::max(1.0, std::abs(exact)));
            if (err[0] > 1e-10) CHECK(err[0] / err[1] == Approx(4.0).margin(0.5));
        }
    }
}

TEST_CASE("initial densities are normalized") {
    const auto bump = InitialDensity::smooth_bump(0.5, 0.25, 0.0, 1.0);
    const auto gauss = InitialDensity::truncated_gaussian(0.4, 0.1, 0.0, 1.0);
    const auto samples = InitialDensity::grid_samples(0.0, 2.0, {1.0, 3.0, 0.0, 4.0});
    for (const auto* g : {&bump, &gauss, &samples}) {
        const int n = 200000;
        const double lo = g->lo();
        const double h = (g->hi() - lo) / n;
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += (*g)(lo + (k + 0.5) * h);
        CHECK(s * h == Approx(1.0).margin(1e-6));
        CHECK(g->cell_average(lo, g->hi()) * (g->hi() - lo) == Approx(1.0).margin(1e-10));
    }
    CHECK(samples(0.25) == Approx(0.25));
    CHECK(bump(0.2) == 0.0);

    const auto product = InitialDensity::product(InitialDensity::smooth_bump(std::numbers::pi, 2.0, 0.0, 2 * std::numbers::pi), bump);
    CHECK(product(std::numbers::pi, 0.5) == Approx(product.angular()(std::numbers::pi) * bump(0.5)));
}

TEST_CASE("HopfPolar splits radial and angular parts") {
    const VectorField f{HopfPolar{1.5, 1.0, 0.0}};
    CHECK(eval_field(f, 0.5) == Approx(0.5 - 0.125));
    CHECK(angular_rate(f) == 1.5);
    CHECK(angular_rate(VectorField{Pitchfork{1.0}}) == 0.0);
}
