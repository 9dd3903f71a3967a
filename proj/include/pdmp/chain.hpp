#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pdmp/model.hpp"

namespace pdmp {

struct Jump {
    double time;
    std::size_t state;  // state entered at `time`
};

/// One trajectory of the environment chain on [0, horizon].
struct ChainPath {
    std::size_t initial_state = 0;
    std::vector<Jump> jumps;  // strictly increasing times in (0, horizon]
    double horizon = 0.0;

    /// State occupied at time t (right-continuous).
    std::size_t state_at(double t) const;
    /// N(t): number of jumps in (0, t].
    std::size_t jumps_until(double t) const;
};

/// SplitMix64 finalizer applied to (master, index); per-path seeds derived this
/// way do not depend on the order in which paths are generated.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

/// Uniform double in [0, 1) from the top 53 bits of the engine output.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Holding time in state i is Exponential(q_i); the next state j != i is drawn
/// with probability q_ij / q_i.
ChainPath sample_path(const SwitchingChain& chain, std::size_t i0, double horizon, std::uint64_t seed);

struct OccupationVector {
    std::vector<double> probs;
    double t = 0.0;
};

/// Row i0 of exp(tQ).
OccupationVector occupation_probabilities(const SwitchingChain& chain, std::size_t i0, double t);

/// exp(tQ) as a dense matrix.
Eigen::MatrixXd transition_matrix(const SwitchingChain& chain, double t);

Eigen::MatrixXd intensity_matrix(const SwitchingChain& chain);

/// (p0, p1) = (q1 / (q0 + q1), q0 / (q0 + q1)) for a two-state chain.
std::pair<double, double> stationary_weights(const SwitchingChain& chain);

}  // namespace pdmp
