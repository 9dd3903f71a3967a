#include <catch_amalgamated.hpp>

#include <cmath>

#include "pdmp/quadrature.hpp"

using namespace pdmp;
using Catch::Approx;

namespace {

GradedIntegral graded(double (*f)(double), double end) {
    const GradedNodes nodes = graded_nodes(end, 60, 0.5);
    std::vector<double> v(nodes.x.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(nodes.x[k]);
    return graded_sum(nodes, v);
}

}  // namespace

TEST_CASE("graded nodes are ascending and interior") {
    const GradedNodes n = graded_nodes(2.0, 60, 0.5);
    REQUIRE(!n.x.empty());
    CHECK(n.x.front() > 0.0);
    CHECK(n.x.back() < 2.0);
    for (std::size_t k = 1; k < n.x.size(); ++k) CHECK(n.x[k] > n.x[k - 1]);
    double w = 0.0;
    for (double v : n.w) w += v;
    CHECK(w == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("integrable endpoint singularities") {
    // int_0^1 x^-1/2 + (1 - x)^-1/2 = 4
    const GradedIntegral r = graded([](double x) { return 1.0 / std::sqrt(x) + 1.0 / std::sqrt(1.0 - x); }, 1.0);
    CHECK(r.finite);
    CHECK(r.value == Approx(4.0).epsilon(1e-7));

    const GradedIntegral smooth = graded([](double x) { return x * x; }, 3.0);
    CHECK(smooth.finite);
    CHECK(smooth.value == Approx(9.0).epsilon(1e-13));
}

TEST_CASE("non-integrable endpoint singularities are detected") {
    CHECK_FALSE(graded([](double x) { return 1.0 / x; }, 1.0).finite);
    CHECK_FALSE(graded([](double x) { return std::pow(1.0 - x, -1.5); }, 1.0).finite);
}

TEST_CASE("adaptive Gauss-Kronrod") {
    CHECK(integrate_gk([](double x) { return std::sin(x); }, 0.0, M_PI) == Approx(2.0).epsilon(1e-13));
    CHECK(integrate_gk([](double x) { return std::exp(x); }, 1.0, 0.0) == Approx(1.0 - std::exp(1.0)).epsilon(1e-13));
}
