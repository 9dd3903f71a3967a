#include <catch_amalgamated.hpp>

#include <cmath>

#include "pdmp/chain.hpp"
#include "pdmp/transport.hpp"

using namespace pdmp;
using Catch::Approx;

namespace {

ModelSpec fig1() {
    return build_builtin(BuiltinModel::Transcritical, {{"q0", 5},
                                                       {"q1", 3},
                                                       {"beta0", 1},
                                                       {"beta1", 4},
                                                       {"c", 2},
                                                       {"mu", 2},
                                                       {"g_center", 0.5},
                                                       {"g_width", 0.5}});
}

ModelSpec linear_growth(double alpha) {
    ModelSpec s;
    s.fields = {VectorField{Polynomial{{0.0, alpha}}}, VectorField{Polynomial{{0.0, alpha}}}};
    s.chain = SwitchingChain::two_state(1.0, 1.0);
    s.domain = Domain::interval(0.0, 5.0);
    s.g = InitialDensity::grid_samples(0.0, 1.0, {1.0});
    return s;
}

}  // namespace

TEST_CASE("empty schedule returns g") {
    const ModelSpec s = fig1();
    const ChainPath path = sample_path(s.chain, 0, 0.0, 1);
    const SwitchSchedule sched = make_schedule(path, 0.0);
    for (double x : {0.1, 0.4, 0.77}) CHECK(pullback_evaluate(sched, s, x) == s.g(x));
}

TEST_CASE("linear pullback scales and dilates") {
    const double alpha = 0.7;
    const double t = 0.9;
    const ModelSpec s = linear_growth(alpha);
    const SwitchSchedule sched{{{0, t}}};
    for (double x : {0.3, 1.2, 1.8}) {
        const double expected = std::exp(-alpha * t) * x < 1.0 ? std::exp(-alpha * t) : 0.0;
        CHECK(pullback_evaluate(sched, s, x) == Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("schedules that leave the domain give zero") {
    const ModelSpec s = fig1();
    // Above the stable point of b1 the backward characteristic runs past x_hi.
    const SwitchSchedule sched{{{1, 3.0}}};
    CHECK(pullback_evaluate(sched, s, 1.4) == 0.0);
}

TEST_CASE("a single pullback carries unit mass") {
    const ModelSpec s = fig1();
    const SwitchSchedule sched{{{0, 0.3}, {1, 0.5}, {0, 0.2}}};
    const Grid1D grid(2048, 0.0, 1.0);
    std::vector<double> u(grid.n_cells);
    for (std::size_t k = 0; k < grid.n_cells; ++k) u[k] = pullback_evaluate(sched, s, grid.center(k));
    double m = 0.0;
    for (std::size_t k = 0; k + 1 < u.size(); ++k) m += 0.5 * (u[k] + u[k + 1]) * grid.dx();
    CHECK(m == Approx(1.0).margin(2e-3));
}

TEST_CASE("Monte Carlo at t = 0 reproduces g") {
    const ModelSpec s = fig1();
    const Grid1D grid(128, 1e-4, 1.0);
    const MCEstimate e = mc_mean(s, grid, 0.0, 50, 1);
    for (std::size_t k = 0; k < grid.n_cells; ++k) {
        CHECK(e.values[0][k] == Approx(s.g(grid.center(k))).epsilon(1e-12).margin(1e-300));
        CHECK(e.values[1][k] == 0.0);
        CHECK(e.std_err[0][k] <= 1e-6 * std::max(1.0, e.values[0][k]));
    }
}

TEST_CASE("per-state masses follow the chain and errors shrink like 1/sqrt(n)") {
    const ModelSpec s = fig1();
    const Grid1D grid(256, 1e-4, 1.0);
    const MCEstimate small = mc_mean(s, grid, 0.5, 1000, 5);
    const MCEstimate large = mc_mean(s, grid, 0.5, 2000, 5);
    const OccupationVector p = occupation_probabilities(s.chain, 0, 0.5);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(std::abs(large.state_mass[i] - p.probs[i]) <= 4.0 * large.state_mass_std_err[i]);
        CHECK(large.state_mass[i] >= 0.0);
        CHECK(large.state_mass[i] <= 1.0);
    }
    double se_small = 0.0;
    double se_large = 0.0;
    for (std::size_t k = 0; k < grid.n_cells; ++k) {
        se_small += small.total_std_err[k];
        se_large += large.total_std_err[k];
        CHECK(large.total[k] >= 0.0);
    }
    const double ratio = se_small / se_large;
    CHECK(ratio >= 1.3);
    CHECK(ratio <= 1.6);
    double mass = 0.0;
    for (double v : large.total) mass += v * grid.dx();
    CHECK(mass <= 1.0 + 3.0 * large.max_std_err() * static_cast<double>(grid.n_cells));
}

TEST_CASE("estimates do not depend on the worker count") {
    const ModelSpec s = fig1();
    const Grid1D grid(64, 1e-4, 1.0);
    MCOptions one;
    one.workers = 1;
    one.block_size = 7;
    MCOptions four;
    four.workers = 4;
    four.block_size = 7;
    const MCEstimate a = mc_mean(s, grid, 1.0, 301, 42, one);
    const MCEstimate b = mc_mean(s, grid, 1.0, 301, 42, four);
    CHECK(a.values == b.values);
    CHECK(a.std_err == b.std_err);
    CHECK(a.state_mass == b.state_mass);
    CHECK(a.occupancy == b.occupancy);
}

TEST_CASE("Monte Carlo mean approaches the stationary regime", "[slow]") {
    const ModelSpec s = fig1();
    const Grid1D grid(512, 1e-4, 1.0);
    const MCEstimate e = mc_mean(s, grid, 2.5, 10000, 1);
    // Independent reference: closed-form stationary density of the fig1 pair,
    // normalized by midpoint quadrature on a fine grid.
    auto f = [](double x) {
        const double w = std::pow(x / (x + 0.5), 5.0) * std::pow((1.0 - x) / x, 1.5);
        return w / (2 * x * (x + 0.5)) + w / (2 * x * (1.0 - x));
    };
    const int n = 400000;
    double kappa = 0.0;
    for (int k = 0; k < n; ++k) kappa += f((k + 0.5) / n) / n;
    double l1 = 0.0;
    for (std::size_t k = 0; k < grid.n_cells; ++k) l1 += std::abs(e.total[k] - f(grid.center(k)) / kappa) * grid.dx();
    CHECK(l1 <= 0.1);
}

TEST_CASE("correlation estimator") {
    const ModelSpec s = fig1();
    const Grid1D axis(32, 1e-4, 1.0);
    const Grid2D grid(axis, axis);

    const MCEstimate c0 = mc_correlation(s, grid, 0.0, 10, 3);
    for (std::size_t x = 0; x < axis.n_cells; ++x) {
        for (std::size_t y = 0; y < axis.n_cells; ++y) {
            CHECK(c0.values[0][grid.index(x, y)] == Approx(s.g(axis.center(x)) * s.g(axis.center(y))).epsilon(1e-12).margin(1e-300));
            CHECK(c0.values[1][grid.index(x, y)] == 0.0);
        }
    }

    const MCEstimate c = mc_correlation(s, grid, 0.7, 400, 3);
    const MCEstimate v = mc_mean(s, axis, 0.7, 400, 3);
    for (std::size_t i = 0; i < 2; ++i) {
        double l1 = 0.0;
        for (std::size_t x = 0; x < axis.n_cells; ++x) {
            double marginal = 0.0;
            for (std::size_t y = 0; y < axis.n_cells; ++y) {
                CHECK(c.values[i][grid.index(x, y)] == c.values[i][grid.index(y, x)]);
                marginal += c.values[i][grid.index(x, y)] * axis.dx();
            }
            l1 += std::abs(marginal - v.values[i][x]) * axis.dx();
        }
        // Per path the marginal is u(x) times the midpoint mass of u, which is 1 up to quadrature error.
        CHECK(l1 <= 0.02);
    }
}

TEST_CASE("polar models are rejected by the estimators") {
    const ModelSpec h = build_builtin(BuiltinModel::Hopf,
                                      {{"q0", 4}, {"q1", 2}, {"mu0", -0.5}, {"mu1", 1}, {"omega0", 1}, {"omega1", 2}});
    CHECK_THROWS_AS(mc_mean(h, Grid1D(32, 0.01, 1.0), 1.0, 10, 1), Error);
}
