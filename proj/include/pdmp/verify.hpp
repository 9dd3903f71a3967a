#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pdmp {

struct CheckOutcome {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerifyOptions {
    std::size_t n_paths = 10000;
    std::uint64_t master_seed = 1;
    unsigned workers = 0;
};

/// sum_k |a_k - b_k| dx
double l1_distance(const std::vector<double>& a, const std::vector<double>& b, double dx);

/// End-to-end checks on the shipped presets: Monte Carlo against the moment
/// solver, growth-rate signs, stationary closed forms, convergence, sweeping,
/// mass identities, correlations, scheme hygiene and reproducibility.
/// `progress` is called after each check.
std::vector<CheckOutcome> run_verification(const VerifyOptions& opts,
                                           const std::function<void(const CheckOutcome&)>& progress = {});

}  // namespace pdmp
