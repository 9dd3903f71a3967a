#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Sparse>

#include "pdmp/grid.hpp"
#include "pdmp/model.hpp"

namespace pdmp {

enum class Boundary { Outflow, Reflecting };
enum class Splitting { Lie, Strang };

struct SolverConfig {
    double cfl = 0.9;
    double t_end = 1.0;
    /// Sorted times in [0, t_end]. Empty means {t_end}.
    std::vector<double> snapshot_times;
    Boundary lower = Boundary::Outflow;
    Boundary upper = Boundary::Outflow;
    Splitting splitting = Splitting::Lie;
};

/// Per-state cell averages at one time. In 2D each state's vector is
/// row-major over the grid (x outer).
struct FieldState {
    double time = 0.0;
    std::vector<std::vector<double>> cells;

    double state_mass(std::size_t i, double cell_measure) const;
    double mass(double cell_measure) const;
    /// Sum over states, per cell.
    std::vector<double> total() const;
};

struct SolveStats {
    std::size_t steps = 0;
    double dt = 0.0;
    /// Smallest cell value seen after any step.
    double min_cell = 0.0;
    /// max over steps of |mass after - mass before|.
    double max_step_mass_change = 0.0;
    /// max over steps of |mass after - mass before + boundary outflow|.
    double max_step_budget_error = 0.0;
    /// Cumulative mass carried out through outflow boundaries.
    double shed_mass = 0.0;
    /// All velocities vanish; only the exact coupling was applied.
    bool cfl_degenerate = false;
};

struct SolveResult {
    std::vector<FieldState> snapshots;
    SolveStats stats;
};

/// Initial condition f_l = g, f_j = 0 (j != l), as cell averages.
FieldState moment_initial_state(const ModelSpec& spec, const Grid1D& grid);
/// C_l(0, x, y) = g(x) g(y) on the tensor grid.
FieldState correlation_initial_state(const ModelSpec& spec, const Grid2D& grid);
/// g(theta, r) on the polar grid (x axis = theta in [0, 2 pi), y axis = r).
FieldState polar_initial_state(const ModelSpec& spec, const Grid2D& grid);

/// First-moment system dV_i/dt = -(b_i V_i)' + sum_j q_ji V_j by Lie or Strang
/// splitting of first-order upwind advection and the exact exp(dt Q^T)
/// coupling.
SolveResult solve_moment(const ModelSpec& spec, const Grid1D& grid, const SolverConfig& cfg);

/// Second-order correlations on E x E: per state, an upwind sweep along x with
/// velocity b_i(x), then along y with b_i(y), then the exact coupling.
SolveResult solve_correlation(const ModelSpec& spec, const Grid2D& grid, const SolverConfig& cfg,
                              const FieldState& init);

/// First-moment system for a HopfPolar model on (theta, r): periodic upwind
/// transport in theta at rate omega_i, radial transport by mu_i r - r^3.
SolveResult solve_moment_polar(const ModelSpec& spec, const Grid2D& grid, const SolverConfig& cfg);

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Upwind advection operator of one field on a 1D grid (du/dt = A u).
SparseMatrix advection_matrix(const VectorField& field, const Grid1D& grid, Boundary lower, Boundary upper);

/// A (x) I_B + I_A (x) B with the row-major (A outer) index convention.
SparseMatrix kronecker_sum(const SparseMatrix& a, const SparseMatrix& b);

/// Upwind advection operator of one field on a 2D tensor grid, assembled face
/// by face.
SparseMatrix advection_matrix_2d(const VectorField& field, const Grid2D& grid, Boundary lower, Boundary upper);

/// Full discrete generator (state-major blocks): block-diagonal advection plus
/// Q^T coupling. Throws SizeCap above 256 cells (1D) or 64 x 64 (2D).
SparseMatrix assemble_discrete_generator(const ModelSpec& spec, const Grid1D& grid,
                                         Boundary lower = Boundary::Outflow, Boundary upper = Boundary::Outflow);
SparseMatrix assemble_discrete_generator(const ModelSpec& spec, const Grid2D& grid,
                                         Boundary lower = Boundary::Outflow, Boundary upper = Boundary::Outflow);

/// "row col value" lines, one per stored entry, 17 significant digits.
void write_coordinate(std::ostream& out, const SparseMatrix& m);

}  // namespace pdmp
