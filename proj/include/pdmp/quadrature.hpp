#pragma once

#include <functional>
#include <vector>

namespace pdmp {

/// Adaptive Gauss-Kronrod (15-point) on [a, b]; signed for b < a.
double integrate_gk(const std::function<double(double)>& f, double a, double b, double tol = 1e-13);

/// Per-level panel contributions of a graded integral over (0, end).
struct GradedIntegral {
    double value = 0.0;
    bool finite = true;
    /// Panel integrals ordered from the midpoint toward 0 (resp. toward end).
    std::vector<double> toward_lower;
    std::vector<double> toward_upper;
};

/// 20-point Gauss-Legendre nodes on a geometric mesh toward both endpoints of
/// (0, end): panels [m r^(k+1), m r^k] and [end - m r^k, end - m r^(k+1)] for
/// k < levels, m = end / 2. Ascending; `panel_of[j]` is the panel of node j.
struct GradedNodes {
    std::vector<double> x;
    std::vector<double> w;
    std::vector<int> panel_of;
    /// Per panel: true below the midpoint.
    std::vector<bool> panel_lower;
    double end = 0.0;
};

GradedNodes graded_nodes(double end, int levels, double ratio = 0.5);

/// Sums integrand values given at the nodes of `nodes` into panel
/// contributions. The integral is declared divergent when the last 10
/// non-empty levels on either side each contribute at least 0.999x the level
/// before them, or when the geometric tail beyond the final level, estimated
/// from the last two levels, exceeds 1e-7 of the total.
GradedIntegral graded_sum(const GradedNodes& nodes, const std::vector<double>& values);

}  // namespace pdmp
