#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "pdmp/chain.hpp"
#include "pdmp/linalg.hpp"

using namespace pdmp;
using Catch::Approx;

namespace {

// Discrete-event oracle: advance in steps of h, leaving state i with
// probability q_i h per step (first-order thinning of the exponential clock).
double thinning_mean_jumps(double q0, double q1, double horizon, int paths, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double h = 1e-3;
    const int steps = static_cast<int>(std::lround(horizon / h));
    double total = 0.0;
    for (int p = 0; p < paths; ++p) {
        int state = 0;
        for (int k = 0; k < steps; ++k) {
            const double rate = state == 0 ? q0 : q1;
            if (u(rng) < rate * h) {
                state = 1 - state;
                total += 1.0;
            }
        }
    }
    return total / paths;
}

}  // namespace

TEST_CASE("zero horizon yields no jumps") {
    const auto c = SwitchingChain::two_state(1.0, 1.0);
    const ChainPath p = sample_path(c, 0, 0.0, 7);
    CHECK(p.jumps.empty());
    CHECK(p.state_at(0.0) == 0);
}

TEST_CASE("sampled paths are well formed and reproducible") {
    const auto c = SwitchingChain::two_state(5.0, 3.0);
    const ChainPath a = sample_path(c, 0, 10.0, 99);
    const ChainPath b = sample_path(c, 0, 10.0, 99);
    REQUIRE(a.jumps.size() == b.jumps.size());
    std::size_t prev = a.initial_state;
    double t = 0.0;
    for (std::size_t k = 0; k < a.jumps.size(); ++k) {
        CHECK(a.jumps[k].time == b.jumps[k].time);
        CHECK(a.jumps[k].state == b.jumps[k].state);
        CHECK(a.jumps[k].time > t);
        CHECK(a.jumps[k].time <= 10.0);
        CHECK(a.jumps[k].state != prev);
        prev = a.jumps[k].state;
        t = a.jumps[k].time;
    }
    CHECK(a.jumps_until(10.0) == a.jumps.size());
    CHECK(derive_seed(1, 2) != derive_seed(1, 3));
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
}

TEST_CASE("mean jump count agrees with a thinning simulation") {
    const auto c = SwitchingChain::two_state(5.0, 3.0);
    const int n = 100000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int p = 0; p < n; ++p) {
        const double k = static_cast<double>(sample_path(c, 0, 1.0, derive_seed(11, p)).jumps.size());
        sum += k;
        sum2 += k * k;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    const double oracle = thinning_mean_jumps(5.0, 3.0, 1.0, 20000, 5);
    // The oracle carries its own noise (20000 paths) and an O(h) bias.
    const double oracle_se = se * std::sqrt(static_cast<double>(n) / 20000.0);
    CHECK(std::abs(mean - oracle) <= 3.0 * std::hypot(se, oracle_se) + 0.01);
}

TEST_CASE("time fraction in state 0 of a symmetric chain") {
    const auto c = SwitchingChain::two_state(1.0, 1.0);
    const double horizon = 10.0;
    double frac = 0.0;
    const int n = 10000;
    for (int p = 0; p < n; ++p) {
        const ChainPath path = sample_path(c, 0, horizon, derive_seed(3, p));
        double t = 0.0;
        std::size_t s = path.initial_state;
        double in0 = 0.0;
        for (const auto& j : path.jumps) {
            if (s == 0) in0 += j.time - t;
            t = j.time;
            s = j.state;
        }
        if (s == 0) in0 += horizon - t;
        frac += in0 / horizon;
    }
    // Starting in state 0 biases the fraction by (1 - e^{-2T}) / (4T) = 0.025 at T = 10.
    CHECK(frac / n == Approx(0.5 + (1 - std::exp(-20.0)) / 40.0).margin(0.01));
    CHECK(frac / n == Approx(0.5).margin(0.03));
}

TEST_CASE("occupation probabilities") {
    const auto sym = SwitchingChain::two_state(1.0, 1.0);
    const OccupationVector p0 = occupation_probabilities(sym, 1, 0.0);
    CHECK(p0.probs[0] == 0.0);
    CHECK(p0.probs[1] == 1.0);

    for (double t : {0.1, 1.0, 3.0}) {
        CHECK(occupation_probabilities(sym, 0, t).probs[0] == Approx((1 + std::exp(-2 * t)) / 2).margin(1e-12));
    }
    CHECK(occupation_probabilities(sym, 0, 1.0).probs[0] == Approx(0.56767).margin(1e-5));

    const auto fig1 = SwitchingChain::two_state(5.0, 3.0);
    const OccupationVector late = occupation_probabilities(fig1, 0, 50.0);
    CHECK(late.probs[0] == Approx(0.375).margin(1e-12));
    CHECK(late.probs[1] == Approx(0.625).margin(1e-12));
}

TEST_CASE("occupation probabilities form a semigroup") {
    const auto c = SwitchingChain::from_rates({{0.0, 2.0, 1.0}, {0.5, 0.0, 0.5}, {3.0, 1.0, 0.0}});
    for (double t : {0.0, 0.7, 2.0, 5.0}) {
        for (double s : {0.3, 1.9, 5.0}) {
            const Eigen::MatrixXd lhs = transition_matrix(c, t + s);
            const Eigen::MatrixXd rhs = transition_matrix(c, t) * transition_matrix(c, s);
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
            const auto p = occupation_probabilities(c, 2, t).probs;
            double sum = 0.0;
            for (double v : p) {
                CHECK(v >= 0.0);
                sum += v;
            }
            CHECK(sum == Approx(1.0).margin(1e-12));
        }
    }
}

TEST_CASE("matrix exponential against a closed form") {
    Eigen::MatrixXd a(2, 2);
    a << 0.0, 1.0, -1.0, 0.0;
    const Eigen::MatrixXd e = expm(3.0 * a);
    CHECK(e(0, 0) == Approx(std::cos(3.0)).margin(1e-13));
    CHECK(e(0, 1) == Approx(std::sin(3.0)).margin(1e-13));
    CHECK(e(1, 0) == Approx(-std::sin(3.0)).margin(1e-13));
}

TEST_CASE("empirical state law at fixed time") {
    const auto c = SwitchingChain::two_state(5.0, 3.0);
    const int n = 100000;
    int in0 = 0;
    for (int p = 0; p < n; ++p) in0 += sample_path(c, 0, 0.3, derive_seed(17, p)).state_at(0.3) == 0;
    const double p0 = occupation_probabilities(c, 0, 0.3).probs[0];
    const double se = std::sqrt(p0 * (1 - p0) / n);
    CHECK(std::abs(static_cast<double>(in0) / n - p0) <= 4 * se);
}

TEST_CASE("stationary weights") {
    auto w = stationary_weights(SwitchingChain::two_state(5.0, 3.0));
    CHECK(w.first == Approx(0.375));
    CHECK(w.second == Approx(0.625));
    w = stationary_weights(SwitchingChain::two_state(2.0, 2.0));
    CHECK(w.first == Approx(0.5));
    w = stationary_weights(SwitchingChain::two_state(2.0, 6.0));
    CHECK(w.first == Approx(0.75));
    CHECK(w.second == Approx(0.25));
    CHECK_THROWS_AS(stationary_weights(SwitchingChain::from_rates({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}})), Error);
}
