#include "pdmp/chain.hpp"

#include <algorithm>
#include <cmath>

#include "pdmp/linalg.hpp"

namespace pdmp {

std::size_t ChainPath::state_at(double t) const {
    std::size_t state = initial_state;
    for (const auto& j : jumps) {
        if (j.time > t) break;
        state = j.state;
    }
    return state;
}

std::size_t ChainPath::jumps_until(double t) const {
    return static_cast<std::size_t>(
        std::upper_bound(jumps.begin(), jumps.end(), t, [](double v, const Jump& j) { return v < j.time; }) -
        jumps.begin());
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(master_seed) ^ index);
}

ChainPath sample_path(const SwitchingChain& chain, std::size_t i0, double horizon, std::uint64_t seed) {
    ChainPath path;
    path.initial_state = i0;
    path.horizon = horizon;
    if (!(horizon > 0.0)) return path;

    std::mt19937_64 rng(seed);
    std::size_t state = i0;
    double t = 0.0;
    while (true) {
        const double q = chain.exit_rate(state);
        t += -std::log1p(-uniform01(rng)) / q;
        if (t > horizon) break;
        // Choose the target by inverting the cumulative jump distribution.
        const double target = uniform01(rng) * q;
        double acc = 0.0;
        std::size_t next = state;
        for (std::size_t j = 0; j < chain.size(); ++j) {
            if (j == state) continue;
            acc += chain.rate(state, j);
            next = j;
            if (target < acc) break;
        }
        state = next;
        path.jumps.push_back({t, state});
    }
    return path;
}

Eigen::MatrixXd intensity_matrix(const SwitchingChain& chain) {
    const auto n = static_cast<Eigen::Index>(chain.size());
    Eigen::MatrixXd q(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            q(i, j) = chain.rate(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        }
    }
    return q;
}

Eigen::MatrixXd transition_matrix(const SwitchingChain& chain, double t) {
    return expm(t * intensity_matrix(chain));
}

OccupationVector occupation_probabilities(const SwitchingChain& chain, std::size_t i0, double t) {
    OccupationVector occ;
    occ.t = t;
    const Eigen::MatrixXd p = transition_matrix(chain, t);
    occ.probs.resize(chain.size());
    for (std::size_t j = 0; j < chain.size(); ++j) {
        occ.probs[j] = p(static_cast<Eigen::Index>(i0), static_cast<Eigen::Index>(j));
    }
    return occ;
}

std::pair<double, double> stationary_weights(const SwitchingChain& chain) {
    if (chain.size() != 2) throw Error(ErrorCode::NotTwoState, "stationary weights need a two-state chain");
    const double q0 = chain.rate(0, 1);
    const double q1 = chain.rate(1, 0);
    return {q1 / (q0 + q1), q0 / (q0 + q1)};
}

}  // namespace pdmp
