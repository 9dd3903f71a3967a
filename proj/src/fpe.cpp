#include "pdmp/fpe.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>

#include "pdmp/chain.hpp"
#include "pdmp/linalg.hpp"

namespace pdmp {

double FieldState::state_mass(std::size_t i, double cell_measure) const {
    double m = 0.0;
    for (double v : cells[i]) m += v;
    return m * cell_measure;
}

double FieldState::mass(double cell_measure) const {
    double m = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) m += state_mass(i, cell_measure);
    return m;
}

std::vector<double> FieldState::total() const {
    std::vector<double> out(cells.empty() ? 0 : cells[0].size(), 0.0);
    for (const auto& c : cells) {
        for (std::size_t k = 0; k < c.size(); ++k) out[k] += c[k];
    }
    return out;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// One transport direction: edge velocities per state (n + 1 edges; for a
// periodic axis edge n is the same face as edge 0).
struct Axis {
    std::size_t n = 0;
    double dx = 1.0;
    bool periodic = false;
    Boundary lower = Boundary::Outflow;
    Boundary upper = Boundary::Outflow;
    std::vector<std::vector<double>> v;

    // Largest outflow rate (per unit time) of any cell for state i.
    double max_rate(std::size_t i) const {
        double m = 0.0;
        const auto& vi = v[i];
        for (std::size_t k = 0; k < n; ++k) {
            const bool left_active = periodic || k > 0 || lower == Boundary::Outflow;
            const bool right_active = periodic || k + 1 < n || upper == Boundary::Outflow;
            double out = 0.0;
            if (right_active) out += std::max(vi[k + 1], 0.0);
            if (left_active) out += std::max(-vi[k], 0.0);
            m = std::max(m, out);
        }
        return m / dx;
    }
};

Axis field_axis(const std::vector<VectorField>& fields, const Grid1D& grid, Boundary lower, Boundary upper) {
    Axis a;
    a.n = grid.n_cells;
    a.dx = grid.dx();
    a.lower = lower;
    a.upper = upper;
    for (const auto& f : fields) {
        std::vector<double> vel(a.n + 1);
        for (std::size_t e = 0; e <= a.n; ++e) vel[e] = eval_field(f, grid.edge(e));
        a.v.push_back(std::move(vel));
    }
    return a;
}

Axis angular_axis(const std::vector<VectorField>& fields, const Grid1D& grid) {
    Axis a;
    a.n = grid.n_cells;
    a.dx = grid.dx();
    a.periodic = true;
    for (const auto& f : fields) a.v.emplace_back(a.n + 1, angular_rate(f));
    return a;
}

// Explicit upwind step along one line of cells u[k * stride]. Returns the
// amount (in cell-value units) that left through the boundary.
double sweep_line(double* u, std::size_t stride, const Axis& axis, const std::vector<double>& v, double ratio,
                  std::vector<double>& flux) {
    const std::size_t n = axis.n;
    for (std::size_t e = 1; e < n; ++e) {
        flux[e] = v[e] > 0.0 ? v[e] * u[(e - 1) * stride] : v[e] * u[e * stride];
    }
    if (axis.periodic) {
        const double f0 = v[0] > 0.0 ? v[0] * u[(n - 1) * stride] : v[0] * u[0];
        flux[0] = f0;
        flux[n] = f0;
    } else {
        flux[0] = axis.lower == Boundary::Outflow ? std::min(v[0], 0.0) * u[0] : 0.0;
        flux[n] = axis.upper == Boundary::Outflow ? std::max(v[n], 0.0) * u[(n - 1) * stride] : 0.0;
    }
    for (std::size_t k = 0; k < n; ++k) u[k * stride] -= ratio * (flux[k + 1] - flux[k]);
    return axis.periodic ? 0.0 : ratio * (flux[n] - flux[0]);
}

class SplitSolver {
public:
    SplitSolver(const SwitchingChain& chain, std::vector<Axis> axes, double cell_measure, const SolverConfig& cfg)
        : chain_(chain), axes_(std::move(axes)), cell_measure_(cell_measure), cfg_(cfg) {
        std::size_t longest = 0;
        for (const auto& a : axes_) longest = std::max(longest, a.n);
        flux_.assign(longest + 1, 0.0);
    }

    SolveResult run(FieldState state) {
        validate_config();
        SolveResult result;
        SolveStats& stats = result.stats;

        double rate = 0.0;
        for (std::size_t i = 0; i < chain_.size(); ++i) {
            double r = 0.0;
            for (const auto& a : axes_) r += a.max_rate(i);
            rate = std::max(rate, r);
        }
        stats.cfl_degenerate = !(rate > 0.0);
        const double dt_max = stats.cfl_degenerate ? std::numeric_limits<double>::infinity() : cfg_.cfl / rate;
        stats.dt = dt_max;
        stats.min_cell = min_cell(state);

        std::vector<double> times = cfg_.snapshot_times;
        if (times.empty()) times.push_back(cfg_.t_end);

        double t = state.time;
        for (double target : times) {
            while (t < target) {
                double dt = target - t;
                if (dt > dt_max * (1.0 + 1e-9)) dt = dt_max;
                const double before = state.mass(cell_measure_);
                const double shed = step(state, dt);
                const double after = state.mass(cell_measure_);
                stats.shed_mass += shed;
                stats.max_step_mass_change = std::max(stats.max_step_mass_change, std::abs(after - before));
                stats.max_step_budget_error = std::max(stats.max_step_budget_error, std::abs(after - before + shed));
                stats.min_cell = std::min(stats.min_cell, min_cell(state));
                ++stats.steps;
                t = (target - t - dt) <= 0.0 ? target : t + dt;
            }
            state.time = target;
            result.snapshots.push_back(state);
        }
        return result;
    }

private:
    void validate_config() const {
        if (!(cfg_.cfl > 0.0) || cfg_.cfl > 1.0) throw Error(ErrorCode::ConstraintViolation, "cfl must be in (0, 1]");
        double prev = 0.0;
        for (double s : cfg_.snapshot_times) {
            if (s < prev || s > cfg_.t_end) {
                throw Error(ErrorCode::ConstraintViolation, "snapshot times must be sorted and within [0, t_end]");
            }
            prev = s;
        }
    }

    double min_cell(const FieldState& s) const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& c : s.cells) {
            for (double v : c) {
                if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteState, "non-finite cell value");
                m = std::min(m, v);
            }
        }
        return m;
    }

    const Eigen::MatrixXd& coupling(double dt) {
        auto it = coupling_cache_.find(dt);
        if (it != coupling_cache_.end()) return it->second;
        Eigen::MatrixXd m = transition_matrix(chain_, dt).transpose();
        // exp(dt Q^T) is entrywise nonnegative; clear rounding residue.
        m = m.cwiseMax(0.0);
        if (coupling_cache_.size() > 16) coupling_cache_.clear();
        return coupling_cache_.emplace(dt, std::move(m)).first->second;
    }

    void couple(FieldState& s, double dt) {
        const std::size_t k = chain_.size();
        if (k < 2) return;
        const Eigen::MatrixXd& m = coupling(dt);
        const std::size_t cells = s.cells[0].size();
        std::vector<double> in(k);
        for (std::size_t c = 0; c < cells; ++c) {
            for (std::size_t j = 0; j < k; ++j) in[j] = s.cells[j][c];
            for (std::size_t i = 0; i < k; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < k; ++j) {
                    acc += m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * in[j];
                }
                s.cells[i][c] = acc;
            }
        }
    }

    // Returns the mass shed through boundaries.
    double advect(FieldState& s, double dt) {
        double lost = 0.0;
        for (std::size_t i = 0; i < s.cells.size(); ++i) {
            double* u = s.cells[i].data();
            if (axes_.size() == 1) {
                const Axis& a = axes_[0];
                lost += sweep_line(u, 1, a, a.v[i], dt / a.dx, flux_);
            } else {
                const Axis& outer = axes_[0];
                const Axis& inner = axes_[1];
                // Outer-axis lines have stride inner.n.
                for (std::size_t j = 0; j < inner.n; ++j) {
                    lost += sweep_line(u + j, inner.n, outer, outer.v[i], dt / outer.dx, flux_);
                }
                for (std::size_t j = 0; j < outer.n; ++j) {
                    lost += sweep_line(u + j * inner.n, 1, inner, inner.v[i], dt / inner.dx, flux_);
                }
            }
        }
        return lost * cell_measure_;
    }

    double step(FieldState& s, double dt) {
        if (cfg_.splitting == Splitting::Strang) {
            couple(s, 0.5 * dt);
            const double lost = advect(s, dt);
            couple(s, 0.5 * dt);
            return lost;
        }
        const double lost = advect(s, dt);
        couple(s, dt);
        return lost;
    }

    const SwitchingChain& chain_;
    std::vector<Axis> axes_;
    double cell_measure_;
    SolverConfig cfg_;
    std::vector<double> flux_;
    std::map<double, Eigen::MatrixXd> coupling_cache_;
};

std::vector<double> cell_averages(const InitialDensity& g, const Grid1D& grid) {
    std::vector<double> out(grid.n_cells);
    for (std::size_t k = 0; k < grid.n_cells; ++k) out[k] = g.cell_average(grid.edge(k), grid.edge(k + 1));
    return out;
}

void require_interval(const ModelSpec& spec) {
    if (spec.is_polar()) throw Error(ErrorCode::ConstraintViolation, "this solver needs an interval domain");
}

}  // namespace

FieldState moment_initial_state(const ModelSpec& spec, const Grid1D& grid) {
    require_interval(spec);
    FieldState s;
    s.cells.assign(spec.n_states(), std::vector<double>(grid.n_cells, 0.0));
    s.cells[spec.initial_state] = cell_averages(spec.g, grid);
    return s;
}

FieldState correlation_initial_state(const ModelSpec& spec, const Grid2D& grid) {
    require_interval(spec);
    const auto gx = cell_averages(spec.g, grid.x);
    const auto gy = cell_averages(spec.g, grid.y);
    FieldState s;
    s.cells.assign(spec.n_states(), std::vector<double>(grid.size(), 0.0));
    auto& c = s.cells[spec.initial_state];
    for (std::size_t ix = 0; ix < grid.x.n_cells; ++ix) {
        for (std::size_t iy = 0; iy < grid.y.n_cells; ++iy) c[grid.index(ix, iy)] = gx[ix] * gy[iy];
    }
    return s;
}

FieldState polar_initial_state(const ModelSpec& spec, const Grid2D& grid) {
    if (!spec.is_polar() || spec.g.kind() != DensityKind::ProductOfMarginals) {
        throw Error(ErrorCode::ConstraintViolation, "polar solver needs a polar model with a product density");
    }
    const auto gt = cell_averages(spec.g.angular(), grid.x);
    const auto gr = cell_averages(spec.g.radial(), grid.y);
    FieldState s;
    s.cells.assign(spec.n_states(), std::vector<double>(grid.size(), 0.0));
    auto& c = s.cells[spec.initial_state];
    for (std::size_t it = 0; it < grid.x.n_cells; ++it) {
        for (std::size_t ir = 0; ir < grid.y.n_cells; ++ir) c[grid.index(it, ir)] = gt[it] * gr[ir];
    }
    return s;
}

SolveResult solve_moment(const ModelSpec& spec, const Grid1D& grid, const SolverConfig& cfg) {
    require_valid(spec);
    std::vector<Axis> axes{field_axis(spec.fields, grid, cfg.lower, cfg.upper)};
    SplitSolver solver(spec.chain, std::move(axes), grid.dx(), cfg);
    return solver.run(moment_initial_state(spec, grid));
}

SolveResult solve_correlation(const ModelSpec& spec, const Grid2D& grid, const SolverConfig& cfg,
                              const FieldState& init) {
    require_valid(spec);
    require_interval(spec);
    if (init.cells.size() != spec.n_states()) throw Error(ErrorCode::ConstraintViolation, "init has wrong state count");
    for (const auto& c : init.cells) {
        if (c.size() != grid.size()) throw Error(ErrorCode::ConstraintViolation, "init does not match the grid");
    }
    if (init.mass(grid.cell_area()) > 1.0 + 1e-9) throw Error(ErrorCode::ConstraintViolation, "init mass exceeds 1");
    std::vector<Axis> axes{field_axis(spec.fields, grid.x, cfg.lower, cfg.upper),
                           field_axis(spec.fields, grid.y, cfg.lower, cfg.upper)};
    SplitSolver solver(spec.chain, std::move(axes), grid.cell_area(), cfg);
    return solver.run(init);
}

SolveResult solve_moment_polar(const ModelSpec& spec, const Grid2D& grid, const SolverConfig& cfg) {
    require_valid(spec);
    if (std::abs(grid.x.lo) > 1e-12 || std::abs(grid.x.hi - kTwoPi) > 1e-12) {
        throw Error(ErrorCode::ConstraintViolation, "polar grid angle axis must cover [0, 2 pi)");
    }
    std::vector<Axis> axes{angular_axis(spec.fields, grid.x), field_axis(spec.fields, grid.y, cfg.lower, cfg.upper)};
    SplitSolver solver(spec.chain, std::move(axes), grid.cell_area(), cfg);
    return solver.run(polar_initial_state(spec, grid));
}

// ---------------------------------------------------------------------------
// Discrete generators
// ---------------------------------------------------------------------------

namespace {

using Triplet = Eigen::Triplet<double>;

// Contributions of edge velocities to one cell of a 1D line, in the order
// used by both the 1D and the 2D assembly so that diagonals round identically.
struct CellRates {
    double diag_left;   // from the left edge
    double diag_right;  // from the right edge
    double from_left;   // inflow coefficient from the left neighbor
    double from_right;  // inflow coefficient from the right neighbor
};

CellRates cell_rates(const std::vector<double>& v, std::size_t k, std::size_t n, double dx, Boundary lower,
                     Boundary upper) {
    const bool left_active = k > 0 || lower == Boundary::Outflow;
    const bool right_active = k + 1 < n || upper == Boundary::Outflow;
    CellRates r{0.0, 0.0, 0.0, 0.0};
    if (left_active) r.diag_left = -(std::max(-v[k], 0.0) / dx);
    if (right_active) r.diag_right = -(std::max(v[k + 1], 0.0) / dx);
    if (k > 0) r.from_left = std::max(v[k], 0.0) / dx;
    if (k + 1 < n) r.from_right = std::max(-v[k + 1], 0.0) / dx;
    return r;
}

std::vector<double> edge_velocities(const VectorField& f, const Grid1D& g) {
    std::vector<double> v(g.n_cells + 1);
    for (std::size_t e = 0; e <= g.n_cells; ++e) v[e] = eval_field(f, g.edge(e));
    return v;
}

}  // namespace

SparseMatrix advection_matrix(const VectorField& field, const Grid1D& grid, Boundary lower, Boundary upper) {
    const std::size_t n = grid.n_cells;
    const auto v = edge_velocities(field, grid);
    std::vector<Triplet> trip;
    for (std::size_t k = 0; k < n; ++k) {
        const CellRates r = cell_rates(v, k, n, grid.dx(), lower, upper);
        const auto row = static_cast<int>(k);
        trip.emplace_back(row, row, r.diag_left + r.diag_right);
        if (k > 0) trip.emplace_back(row, row - 1, r.from_left);
        if (k + 1 < n) trip.emplace_back(row, row + 1, r.from_right);
    }
    SparseMatrix a(static_cast<int>(n), static_cast<int>(n));
    a.setFromTriplets(trip.begin(), trip.end());
    return a;
}

SparseMatrix kronecker_sum(const SparseMatrix& a, const SparseMatrix& b) {
    const int na = static_cast<int>(a.rows());
    const int nb = static_cast<int>(b.rows());
    std::vector<Triplet> trip;
    for (int k = 0; k < a.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
            for (int j = 0; j < nb; ++j) trip.emplace_back(it.row() * nb + j, it.col() * nb + j, it.value());
        }
    }
    for (int k = 0; k < b.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(b, k); it; ++it) {
            for (int i = 0; i < na; ++i) trip.emplace_back(i * nb + it.row(), i * nb + it.col(), it.value());
        }
    }
    SparseMatrix out(na * nb, na * nb);
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

SparseMatrix advection_matrix_2d(const VectorField& field, const Grid2D& grid, Boundary lower, Boundary upper) {
    const std::size_t nx = grid.x.n_cells;
    const std::size_t ny = grid.y.n_cells;
    const auto vx = edge_velocities(field, grid.x);
    const auto vy = edge_velocities(field, grid.y);
    std::vector<Triplet> trip;
    for (std::size_t ix = 0; ix < nx; ++ix) {
        const CellRates rx = cell_rates(vx, ix, nx, grid.x.dx(), lower, upper);
        for (std::size_t iy = 0; iy < ny; ++iy) {
            const CellRates ry = cell_rates(vy, iy, ny, grid.y.dx(), lower, upper);
            const auto row = static_cast<int>(grid.index(ix, iy));
            trip.emplace_back(row, row, (rx.diag_left + rx.diag_right) + (ry.diag_left + ry.diag_right));
            if (ix > 0) trip.emplace_back(row, static_cast<int>(grid.index(ix - 1, iy)), rx.from_left);
            if (ix + 1 < nx) trip.emplace_back(row, static_cast<int>(grid.index(ix + 1, iy)), rx.from_right);
            if (iy > 0) trip.emplace_back(row, static_cast<int>(grid.index(ix, iy - 1)), ry.from_left);
            if (iy + 1 < ny) trip.emplace_back(row, static_cast<int>(grid.index(ix, iy + 1)), ry.from_right);
        }
    }
    const auto n = static_cast<int>(grid.size());
    SparseMatrix a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());
    return a;
}

namespace {

SparseMatrix with_coupling(const ModelSpec& spec, const std::vector<SparseMatrix>& blocks, int block_size) {
    const int k = static_cast<int>(spec.n_states());
    std::vector<Triplet> trip;
    for (int i = 0; i < k; ++i) {
        const SparseMatrix& b = blocks[static_cast<std::size_t>(i)];
        for (int c = 0; c < b.outerSize(); ++c) {
            for (SparseMatrix::InnerIterator it(b, c); it; ++it) {
                trip.emplace_back(i * block_size + it.row(), i * block_size + it.col(), it.value());
            }
        }
    }
    // (Q^T u)_i = sum_j q_ji u_j, cell by cell.
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            const double q = spec.chain.rate(static_cast<std::size_t>(j), static_cast<std::size_t>(i));
            if (q == 0.0) continue;
            for (int c = 0; c < block_size; ++c) trip.emplace_back(i * block_size + c, j * block_size + c, q);
        }
    }
    SparseMatrix g(k * block_size, k * block_size);
    g.setFromTriplets(trip.begin(), trip.end());
    return g;
}

}  // namespace

SparseMatrix assemble_discrete_generator(const ModelSpec& spec, const Grid1D& grid, Boundary lower, Boundary upper) {
    require_interval(spec);
    if (grid.n_cells > 256) throw Error(ErrorCode::SizeCap, "generator assembly is capped at 256 cells");
    std::vector<SparseMatrix> blocks;
    for (const auto& f : spec.fields) blocks.push_back(advection_matrix(f, grid, lower, upper));
    return with_coupling(spec, blocks, static_cast<int>(grid.n_cells));
}

SparseMatrix assemble_discrete_generator(const ModelSpec& spec, const Grid2D& grid, Boundary lower, Boundary upper) {
    require_interval(spec);
    if (grid.x.n_cells > 64 || grid.y.n_cells > 64) {
        throw Error(ErrorCode::SizeCap, "2D generator assembly is capped at 64 x 64 cells");
    }
    std::vector<SparseMatrix> blocks;
    for (const auto& f : spec.fields) blocks.push_back(advection_matrix_2d(f, grid, lower, upper));
    return with_coupling(spec, blocks, static_cast<int>(grid.size()));
}

void write_coordinate(std::ostream& out, const SparseMatrix& m) {
    const auto old = out.precision(17);
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
        }
    }
    out.precision(old);
}

}  // namespace pdmp
