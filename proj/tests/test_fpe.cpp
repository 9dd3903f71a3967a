#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "pdmp/chain.hpp"
#include "pdmp/fpe.hpp"

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

SolverConfig at(std::vector<double> times) {
    SolverConfig cfg;
    cfg.snapshot_times = std::move(times);
    cfg.t_end = cfg.snapshot_times.back();
    return cfg;
}

ModelSpec frozen(double q0, double q1) {
    ModelSpec s;
    s.fields = {VectorField{Polynomial{{0.0}}}, VectorField{Polynomial{{0.0}}}};
    s.chain = SwitchingChain::two_state(q0, q1);
    s.domain = Domain::interval(0.0, 1.0);
    s.g = InitialDensity::smooth_bump(0.5, 0.3, 0.0, 1.0);
    return s;
}

double l1(const std::vector<double>& a, const std::vector<double>& b, double dx) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]) * dx;
    return s;
}

double max_abs(const SparseMatrix& m) {
    double out = 0.0;
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) out = std::max(out, std::abs(it.value()));
    }
    return out;
}

}  // namespace

TEST_CASE("constant velocity translates the initial bump") {
    ModelSpec s;
    s.fields = {VectorField{Polynomial{{0.5}}}, VectorField{Polynomial{{0.5}}}};
    s.chain = SwitchingChain::two_state(1.0, 1.0);
    s.domain = Domain::interval(0.0, 2.0);
    s.g = InitialDensity::smooth_bump(0.5, 0.25, 0.0, 2.0);
    const Grid1D grid(512, 0.0, 2.0);
    const SolveResult r = solve_moment(s, grid, at({1.0}));
    // Exact solution: the bump moved by 0.5, independently of the switching.
    std::vector<double> exact(grid.n_cells);
    for (std::size_t k = 0; k < grid.n_cells; ++k) {
        exact[k] = s.g.cell_average(grid.edge(k) - 0.5, grid.edge(k + 1) - 0.5);
    }
    CHECK(l1(r.snapshots.back().total(), exact, grid.dx()) <= 0.05);
}

TEST_CASE("frozen fields: per-state masses follow the Kolmogorov solution") {
    const ModelSpec s = frozen(1.0, 1.0);
    const Grid1D grid(128, 0.0, 1.0);
    const double m0 = moment_initial_state(s, grid).mass(grid.dx());
    const SolveResult r = solve_moment(s, grid, at({0.1, 0.5, 1.0, 3.0}));
    CHECK(r.stats.cfl_degenerate);
    for (const auto& snap : r.snapshots) {
        const double e = std::exp(-2 * snap.time);
        CHECK(snap.state_mass(0, grid.dx()) == Approx(m0 * (1 + e) / 2).margin(1e-8));
        CHECK(snap.state_mass(1, grid.dx()) == Approx(m0 * (1 - e) / 2).margin(1e-8));
    }
}

TEST_CASE("frozen fields: asymmetric chain against occupation probabilities") {
    const ModelSpec s = frozen(5.0, 3.0);
    const Grid1D grid(64, 0.0, 1.0);
    const double m0 = moment_initial_state(s, grid).mass(grid.dx());
    const SolveResult r = solve_moment(s, grid, at({0.25, 1.0, 2.5}));
    for (const auto& snap : r.snapshots) {
        const auto p = occupation_probabilities(s.chain, 0, snap.time).probs;
        for (std::size_t i = 0; i < 2; ++i) CHECK(snap.state_mass(i, grid.dx()) == Approx(m0 * p[i]).margin(1e-8));
    }
}

TEST_CASE("positivity and mass accounting on the transcritical model") {
    const ModelSpec s = fig1();
    const Grid1D grid(256, 1e-4, 1.0);
    const SolveResult out = solve_moment(s, grid, at({0.5, 2.0}));
    CHECK(out.stats.min_cell >= 0.0);
    CHECK(out.stats.max_step_budget_error <= 1e-12);
    CHECK(out.snapshots[1].mass(grid.dx()) <= out.snapshots[0].mass(grid.dx()));

    SolverConfig closed = at({0.5, 2.0});
    closed.lower = closed.upper = Boundary::Reflecting;
    const SolveResult refl = solve_moment(s, grid, closed);
    CHECK(refl.stats.max_step_mass_change <= 1e-12);
    CHECK(refl.stats.shed_mass == 0.0);

    SolverConfig strang = at({0.5});
    strang.splitting = Splitting::Strang;
    CHECK(solve_moment(s, grid, strang).stats.min_cell >= 0.0);
}

TEST_CASE("first-order self-convergence") {
    const ModelSpec s = fig1();
    std::vector<std::vector<double>> sol;
    for (std::size_t n : {256u, 512u, 1024u}) {
        const Grid1D g(n, 1e-4, 1.0);
        sol.push_back(solve_moment(s, g, at({1.0})).snapshots.back().total());
    }
    // Compare on the coarsest grid by averaging pairs of fine cells.
    auto coarsen = [](const std::vector<double>& v) {
        std::vector<double> out(v.size() / 2);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = 0.5 * (v[2 * k] + v[2 * k + 1]);
        return out;
    };
    const double d1 = l1(sol[0], coarsen(sol[1]), (1.0 - 1e-4) / 256);
    const double d2 = l1(sol[1], coarsen(sol[2]), (1.0 - 1e-4) / 512);
    CHECK(d1 >= 1.8 * d2);
}

TEST_CASE("advection matrices conserve mass in the interior") {
    const ModelSpec s = fig1();
    const Grid1D grid(64, 1e-4, 1.0);
    for (const auto& f : s.fields) {
        const SparseMatrix a = advection_matrix(f, grid, Boundary::Outflow, Boundary::Outflow);
        const Eigen::RowVectorXd sums = Eigen::RowVectorXd::Ones(a.rows()) * a;
        for (int j = 0; j < sums.size(); ++j) CHECK(sums(j) <= 1e-12);
        for (int j = 1; j + 1 < sums.size(); ++j) CHECK(sums(j) == Approx(0.0).margin(1e-12));
    }
    const SparseMatrix full = assemble_discrete_generator(s, grid);
    const Eigen::RowVectorXd sums = Eigen::RowVectorXd::Ones(full.rows()) * full;
    CHECK(sums.maxCoeff() <= 1e-10);
    CHECK_THROWS_AS(assemble_discrete_generator(s, Grid1D(512, 1e-4, 1.0)), Error);
}

TEST_CASE("2D advection equals the Kronecker sum of 1D operators") {
    const ModelSpec s = fig1();
    const Grid1D axis(24, 1e-4, 1.0);
    const Grid2D grid(axis, axis);
    for (const auto& f : s.fields) {
        const SparseMatrix a = advection_matrix(f, axis, Boundary::Outflow, Boundary::Outflow);
        const SparseMatrix k = kronecker_sum(a, a);
        CHECK(max_abs(advection_matrix_2d(f, grid, Boundary::Outflow, Boundary::Outflow) - k) == 0.0);
    }
    // Independent construction of A (x) I + I (x) A from dense products.
    const SparseMatrix a = advection_matrix(s.fields[1], axis, Boundary::Outflow, Boundary::Outflow);
    const Eigen::MatrixXd ad(a);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(ad.rows(), ad.cols());
    const Eigen::Index n = ad.rows();
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) dense.block(i * n, j * n, n, n) = ad(i, j) * id + id(i, j) * ad;
    }
    CHECK((Eigen::MatrixXd(kronecker_sum(a, a)) - dense).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("correlation solver: symmetry, marginals, conservation") {
    const ModelSpec s = fig1();
    const Grid1D axis(48, 1e-4, 1.0);
    const Grid2D grid(axis, axis);
    const FieldState init = correlation_initial_state(s, grid);
    const SolveResult r0 = solve_correlation(s, grid, at({0.0}), init);
    CHECK(r0.snapshots[0].cells == init.cells);

    const SolveResult r = solve_correlation(s, grid, at({0.5}), init);
    const FieldState& c = r.snapshots.back();
    const SolveResult v = solve_moment(s, axis, at({0.5}));
    for (std::size_t i = 0; i < 2; ++i) {
        double asym = 0.0;
        std::vector<double> marginal(axis.n_cells, 0.0);
        for (std::size_t x = 0; x < axis.n_cells; ++x) {
            for (std::size_t y = 0; y < axis.n_cells; ++y) {
                asym = std::max(asym, std::abs(c.cells[i][grid.index(x, y)] - c.cells[i][grid.index(y, x)]));
                marginal[x] += c.cells[i][grid.index(x, y)] * axis.dx();
            }
        }
        CHECK(asym <= 1e-14);
        CHECK(l1(marginal, v.snapshots.back().cells[i], axis.dx()) <= 0.05);
    }

    SolverConfig closed = at({0.5});
    closed.lower = closed.upper = Boundary::Reflecting;
    CHECK(solve_correlation(s, grid, closed, init).stats.max_step_mass_change <= 1e-12);
}

TEST_CASE("coordinate export") {
    const ModelSpec s = fig1();
    const SparseMatrix a = advection_matrix(s.fields[0], Grid1D(16, 1e-4, 1.0), Boundary::Outflow, Boundary::Outflow);
    std::ostringstream out;
    write_coordinate(out, a);
    std::istringstream in(out.str());
    int r = 0;
    int c = 0;
    double v = 0.0;
    std::size_t lines = 0;
    while (in >> r >> c >> v) {
        CHECK(v == a.coeff(r, c));
        ++lines;
    }
    CHECK(lines == static_cast<std::size_t>(a.nonZeros()));
}

TEST_CASE("polar solver keeps the density nonnegative") {
    const ModelSpec h = build_builtin(BuiltinModel::Hopf, {{"q0", 4},
                                                           {"q1", 2},
                                                           {"mu0", -0.5},
                                                           {"mu1", 1},
                                                           {"omega0", 1},
                                                           {"omega1", 2},
                                                           {"g_center", 0.5},
                                                           {"g_width", 0.5}});
    const Grid2D grid(Grid1D(32, 0.0, 2 * std::numbers::pi), Grid1D(32, 1e-4, 1.0));
    const SolveResult r = solve_moment_polar(h, grid, at({1.0}));
    CHECK(r.stats.min_cell >= 0.0);
    CHECK(r.snapshots.back().mass(grid.cell_area()) <= 1.0 + 1e-12);
}
