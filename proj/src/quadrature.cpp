#include "pdmp/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace pdmp {

double integrate_gk(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    if (b < a) return -integrate_gk(f, b, a, tol);
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 12, tol);
}

namespace {

struct Panel {
    double lo;
    double hi;
    bool lower_side;
    int level;
};

std::vector<Panel> graded_panels(double end, int levels, double ratio) {
    const double m = 0.5 * end;
    std::vector<Panel> lower;
    std::vector<Panel> upper;
    double d = m;
    for (int k = 0; k < levels; ++k) {
        const double next = d * ratio;
        lower.push_back({next, d, true, k});
        const double a = end - d;
        const double b = end - next;
        if (b > a && b < end) upper.push_back({a, b, false, k});
        d = next;
    }
    std::vector<Panel> out(lower.rbegin(), lower.rend());
    out.insert(out.end(), upper.begin(), upper.end());
    return out;
}

}  // namespace

GradedNodes graded_nodes(double end, int levels, double ratio) {
    using GL = boost::math::quadrature::gauss<double, 20>;
    const auto& abscissa = GL::abscissa();
    const auto& weights = GL::weights();

    GradedNodes nodes;
    nodes.end = end;
    int index = 0;
    for (const auto& p : graded_panels(end, levels, ratio)) {
        const double half = 0.5 * (p.hi - p.lo);
        const double mid = 0.5 * (p.hi + p.lo);
        // abscissa holds the nonnegative half of the symmetric rule.
        std::vector<double> xs;
        std::vector<double> ws;
        for (std::size_t j = abscissa.size(); j-- > 0;) {
            xs.push_back(mid - half * abscissa[j]);
            ws.push_back(half * weights[j]);
        }
        for (std::size_t j = 0; j < abscissa.size(); ++j) {
            xs.push_back(mid + half * abscissa[j]);
            ws.push_back(half * weights[j]);
        }
        // Panels too thin to place distinct interior nodes are dropped whole.
        bool resolvable = xs.front() > (nodes.x.empty() ? 0.0 : nodes.x.back()) && xs.back() < end;
        for (std::size_t j = 1; j < xs.size() && resolvable; ++j) resolvable = xs[j] > xs[j - 1];
        if (!resolvable) continue;
        for (std::size_t j = 0; j < xs.size(); ++j) {
            nodes.x.push_back(xs[j]);
            nodes.w.push_back(ws[j]);
            nodes.panel_of.push_back(index);
        }
        nodes.panel_lower.push_back(p.lower_side);
        ++index;
    }
    return nodes;
}

GradedIntegral graded_sum(const GradedNodes& nodes, const std::vector<double>& values) {
    GradedIntegral out;
    const std::size_t n_panels = nodes.panel_lower.size();
    std::vector<double> panel(n_panels, 0.0);
    for (std::size_t j = 0; j < nodes.x.size(); ++j) {
        panel[static_cast<std::size_t>(nodes.panel_of[j])] += nodes.w[j] * values[j];
    }
    // Lower-side panels come first in ascending x, i.e. deepest level first.
    for (std::size_t p = n_panels; p-- > 0;) {
        if (nodes.panel_lower[p]) out.toward_lower.push_back(panel[p]);
    }
    for (std::size_t p = 0; p < n_panels; ++p) {
        if (!nodes.panel_lower[p]) out.toward_upper.push_back(panel[p]);
    }

    for (double v : panel) out.value += v;
    if (!std::isfinite(out.value)) {
        out.finite = false;
        return out;
    }

    auto diverges = [&](const std::vector<double>& levels) {
        if (levels.empty()) return false;
        if (levels.size() >= 2 && levels[levels.size() - 2] != 0.0) {
            // Geometric estimate of the part of the integral beyond the last level.
            const double r = levels.back() / levels[levels.size() - 2];
            if (r >= 1.0 || std::abs(levels.back()) * r / (1.0 - r) > 1e-7 * std::abs(out.value)) return true;
        }
        if (levels.size() < 11) return false;
        for (std::size_t k = levels.size() - 10; k < levels.size(); ++k) {
            if (levels[k] < 0.999 * levels[k - 1]) return false;
        }
        return true;
    };
    out.finite = !diverges(out.toward_lower) && !diverges(out.toward_upper);
    return out;
}

}  // namespace pdmp
