#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "pdmp/chain.hpp"
#include "pdmp/flow.hpp"
#include "pdmp/grid.hpp"
#include "pdmp/model.hpp"

namespace pdmp {

struct Segment {
    std::size_t state;
    double duration;
};

/// The chain path restricted to [0, t] as consecutive (state, duration)
/// pieces, in forward time order.
struct SwitchSchedule {
    std::vector<Segment> segments;

    double total() const;
    std::size_t terminal_state() const { return segments.back().state; }
};

/// Segments of `path` on [0, t]; a single zero-length segment in the initial
/// state when t = 0.
SwitchSchedule make_schedule(const ChainPath& path, double t);

/// u(t, x) = U(t) g (x) for the path encoded in `schedule`: the point x is
/// pulled back through each segment in reverse and the Frobenius-Perron
/// Jacobians are accumulated. Returns 0 when a backward characteristic leaves
/// the domain. Throws Diverged if integration produced a non-finite state.
double pullback_evaluate(const SwitchSchedule& schedule, const ModelSpec& spec, double x,
                         const IntegratorConfig& cfg = {});

struct MCOptions {
    IntegratorConfig integrator{.base_step = 0.02};
    /// Worker threads; 0 picks hardware concurrency. Results do not depend on
    /// this value.
    unsigned workers = 0;
    /// Paths per accumulation block. Blocks are merged in index order.
    std::size_t block_size = 64;
};

/// Monte Carlo estimate of V_i(t, .) (or C_i(t, ., .) when `y_grid` is set),
/// evaluated at grid cell centers. Arrays are indexed [state][node] with
/// 2D nodes stored row-major, x outer.
struct MCEstimate {
    Grid1D x_grid;
    std::optional<Grid1D> y_grid;
    double t = 0.0;
    std::size_t n_paths = 0;

    std::vector<std::vector<double>> values;
    std::vector<std::vector<double>> std_err;
    std::vector<double> total;
    std::vector<double> total_std_err;

    /// Per-state mass sum_x V_i dx (dx dy in 2D), with its standard error.
    std::vector<double> state_mass;
    std::vector<double> state_mass_std_err;
    /// Empirical distribution of i(t).
    std::vector<double> occupancy;
    /// 1 - total mass; mass carried out of the truncated domain.
    double shed_mass = 0.0;

    std::size_t n_states() const { return values.size(); }
    double max_std_err() const;
};

MCEstimate mc_mean(const ModelSpec& spec, const Grid1D& grid, double t, std::size_t n_paths,
                   std::uint64_t master_seed, const MCOptions& opts = {});

/// Both axes must coincide (the correlation lives on E x E); u(t, x) u(t, y)
/// is then formed from a single set of pullbacks per path, which makes the
/// estimate exactly symmetric.
MCEstimate mc_correlation(const ModelSpec& spec, const Grid2D& grid, double t, std::size_t n_paths,
                          std::uint64_t master_seed, const MCOptions& opts = {});

}  // namespace pdmp
