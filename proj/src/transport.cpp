#include "pdmp/transport.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace pdmp {

double SwitchSchedule::total() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration;
    return t;
}

SwitchSchedule make_schedule(const ChainPath& path, double t) {
    SwitchSchedule schedule;
    std::size_t state = path.initial_state;
    double start = 0.0;
    for (const auto& jump : path.jumps) {
        if (jump.time > t) break;
        if (jump.time > start) schedule.segments.push_back({state, jump.time - start});
        state = jump.state;
        start = jump.time;
    }
    if (t > start || schedule.segments.empty()) schedule.segments.push_back({state, t - start});
    return schedule;
}

double pullback_evaluate(const SwitchSchedule& schedule, const ModelSpec& spec, double x,
                         const IntegratorConfig& cfg) {
    if (!spec.domain.contains(x)) return 0.0;
    double y = x;
    double logj = 0.0;
    for (auto it = schedule.segments.rbegin(); it != schedule.segments.rend(); ++it) {
        if (!(it->duration > 0.0)) continue;
        const FlowResult r = backward(spec.fields[it->state], spec.domain, y, it->duration, cfg);
        if (r.status == FlowStatus::ExitedDomain) return 0.0;
        if (r.status == FlowStatus::Diverged) {
            throw Error(ErrorCode::Diverged, "backward characteristic from x = " + std::to_string(x));
        }
        y = r.endpoint;
        logj += r.log_jacobian;
    }
    return spec.g(y) * std::exp(logj);
}

double MCEstimate::max_std_err() const {
    double m = 0.0;
    for (const auto& row : std_err) {
        for (double v : row) m = std::max(m, v);
    }
    return m;
}

namespace {

struct Accumulator {
    std::vector<std::vector<double>> sum;
    std::vector<std::vector<double>> sumsq;
    std::vector<double> total_sum;
    std::vector<double> total_sumsq;
    std::vector<double> mass_sum;
    std::vector<double> mass_sumsq;
    std::vector<double> count;

    Accumulator(std::size_t states, std::size_t nodes)
        : sum(states, std::vector<double>(nodes, 0.0)),
          sumsq(states, std::vector<double>(nodes, 0.0)),
          total_sum(nodes, 0.0),
          total_sumsq(nodes, 0.0),
          mass_sum(states, 0.0),
          mass_sumsq(states, 0.0),
          count(states, 0.0) {}

    void merge(const Accumulator& o) {
        for (std::size_t i = 0; i < sum.size(); ++i) {
            for (std::size_t k = 0; k < sum[i].size(); ++k) {
                sum[i][k] += o.sum[i][k];
                sumsq[i][k] += o.sumsq[i][k];
            }
            mass_sum[i] += o.mass_sum[i];
            mass_sumsq[i] += o.mass_sumsq[i];
            count[i] += o.count[i];
        }
        for (std::size_t k = 0; k < total_sum.size(); ++k) {
            total_sum[k] += o.total_sum[k];
            total_sumsq[k] += o.total_sumsq[k];
        }
    }
};

// Runs `per_path(path_index, acc)` over all paths in fixed-size blocks and
// merges the block accumulators in block order.
template <class PerPath>
Accumulator run_blocks(std::size_t n_paths, std::size_t states, std::size_t nodes, const MCOptions& opts,
                       PerPath&& per_path) {
    const std::size_t block = std::max<std::size_t>(opts.block_size, 1);
    const std::size_t n_blocks = (n_paths + block - 1) / block;
    std::vector<Accumulator> partial(n_blocks, Accumulator(states, nodes));

    auto work_block = [&](std::size_t b) {
        const std::size_t end = std::min(n_paths, (b + 1) * block);
        for (std::size_t p = b * block; p < end; ++p) per_path(p, partial[b]);
    };

    unsigned workers = opts.workers ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n_blocks, 1)));
    if (workers <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) work_block(b);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t b = next++; b < n_blocks; b = next++) {
                    try {
                        work_block(b);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    Accumulator acc(states, nodes);
    for (const auto& part : partial) acc.merge(part);
    return acc;
}

void finalize(MCEstimate& est, const Accumulator& acc, double cell_measure) {
    const double n = static_cast<double>(est.n_paths);
    auto mean_se = [n](double s, double s2, double& mean, double& se) {
        mean = s / n;
        if (n > 1.0) {
            const double var = std::max(0.0, (s2 / n - mean * mean) * n / (n - 1.0));
            se = std::sqrt(var / n);
        } else {
            se = 0.0;
        }
    };

    const std::size_t states = acc.sum.size();
    const std::size_t nodes = acc.total_sum.size();
    est.values.assign(states, std::vector<double>(nodes));
    est.std_err.assign(states, std::vector<double>(nodes));
    est.total.assign(nodes, 0.0);
    est.total_std_err.assign(nodes, 0.0);
    est.state_mass.assign(states, 0.0);
    est.state_mass_std_err.assign(states, 0.0);
    est.occupancy.assign(states, 0.0);

    for (std::size_t i = 0; i < states; ++i) {
        for (std::size_t k = 0; k < nodes; ++k) mean_se(acc.sum[i][k], acc.sumsq[i][k], est.values[i][k], est.std_err[i][k]);
        mean_se(acc.mass_sum[i], acc.mass_sumsq[i], est.state_mass[i], est.state_mass_std_err[i]);
        est.occupancy[i] = acc.count[i] / n;
    }
    for (std::size_t k = 0; k < nodes; ++k) mean_se(acc.total_sum[k], acc.total_sumsq[k], est.total[k], est.total_std_err[k]);

    double mass = 0.0;
    for (double v : est.total) mass += v * cell_measure;
    est.shed_mass = 1.0 - mass;
}

void check_inputs(const ModelSpec& spec, double t, std::size_t n_paths) {
    if (spec.is_polar()) throw Error(ErrorCode::ConstraintViolation, "Monte Carlo estimators need an interval domain");
    if (!(t >= 0.0)) throw Error(ErrorCode::ConstraintViolation, "t must be nonnegative");
    if (n_paths < 1) throw Error(ErrorCode::ConstraintViolation, "n_paths must be at least 1");
}

}  // namespace

MCEstimate mc_mean(const ModelSpec& spec, const Grid1D& grid, double t, std::size_t n_paths,
                   std::uint64_t master_seed, const MCOptions& opts) {
    check_inputs(spec, t, n_paths);
    const std::size_t states = spec.n_states();
    const std::size_t nodes = grid.n_cells;
    const double dx = grid.dx();

    const Accumulator acc = run_blocks(n_paths, states, nodes, opts, [&](std::size_t p, Accumulator& a) {
        const ChainPath path = sample_path(spec.chain, spec.initial_state, t, derive_seed(master_seed, p));
        const SwitchSchedule schedule = make_schedule(path, t);
        const std::size_t s = schedule.terminal_state();
        double mass = 0.0;
        for (std::size_t k = 0; k < nodes; ++k) {
            const double u = pullback_evaluate(schedule, spec, grid.center(k), opts.integrator);
            a.sum[s][k] += u;
            a.sumsq[s][k] += u * u;
            a.total_sum[k] += u;
            a.total_sumsq[k] += u * u;
            mass += u * dx;
        }
        a.mass_sum[s] += mass;
        a.mass_sumsq[s] += mass * mass;
        a.count[s] += 1.0;
    });

    MCEstimate est;
    est.x_grid = grid;
    est.t = t;
    est.n_paths = n_paths;
    finalize(est, acc, dx);
    return est;
}

MCEstimate mc_correlation(const ModelSpec& spec, const Grid2D& grid, double t, std::size_t n_paths,
                          std::uint64_t master_seed, const MCOptions& opts) {
    check_inputs(spec, t, n_paths);
    if (grid.x.n_cells != grid.y.n_cells || grid.x.lo != grid.y.lo || grid.x.hi != grid.y.hi) {
        throw Error(ErrorCode::ConstraintViolation, "correlation grid axes must coincide");
    }
    const std::size_t states = spec.n_states();
    const std::size_t n = grid.x.n_cells;
    const double dx = grid.x.dx();

    const Accumulator acc = run_blocks(n_paths, states, n * n, opts, [&](std::size_t p, Accumulator& a) {
        const ChainPath path = sample_path(spec.chain, spec.initial_state, t, derive_seed(master_seed, p));
        const SwitchSchedule schedule = make_schedule(path, t);
        const std::size_t s = schedule.terminal_state();
        std::vector<double> u(n);
        double mass1 = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            u[k] = pullback_evaluate(schedule, spec, grid.x.center(k), opts.integrator);
            mass1 += u[k] * dx;
        }
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t m = 0; m < n; ++m) {
                const double c = u[k] * u[m];
                a.sum[s][k * n + m] += c;
                a.sumsq[s][k * n + m] += c * c;
                a.total_sum[k * n + m] += c;
                a.total_sumsq[k * n + m] += c * c;
            }
        }
        const double mass = mass1 * mass1;
        a.mass_sum[s] += mass;
        a.mass_sumsq[s] += mass * mass;
        a.count[s] += 1.0;
    });

    MCEstimate est;
    est.x_grid = grid.x;
    est.y_grid = grid.y;
    est.t = t;
    est.n_paths = n_paths;
    finalize(est, acc, dx * dx);
    return est;
}

}  // namespace pdmp
