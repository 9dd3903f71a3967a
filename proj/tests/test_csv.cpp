#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pdmp/csv.hpp"

using namespace pdmp;
using Catch::Approx;

namespace {

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "pdmp_csv_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("reals round-trip through their text") {
    for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0}) {
        CHECK(std::strtod(format_real(v).c_str(), nullptr) == v);
    }
}

TEST_CASE("trapezoid rule") {
    const Grid1D g(16, 0.0, 1.0);
    std::vector<double> ones(16, 1.0);
    CHECK(trapezoid(g, ones) == Approx(15.0 / 16.0));
    const Grid2D g2(g, Grid1D(32, 0.0, 2.0));
    std::vector<double> ones2(g2.size(), 1.0);
    CHECK(trapezoid(g2, ones2) == Approx((15.0 / 16.0) * (31.0 / 16.0)));
}

TEST_CASE("1D profile layout and mass row") {
    const Grid1D g(16, 0.0, 1.0);
    std::vector<std::vector<double>> states(2, std::vector<double>(16));
    std::vector<double> total(16);
    for (std::size_t k = 0; k < 16; ++k) {
        states[0][k] = 0.1 * k;
        states[1][k] = 1.0 / (1.0 + k);
        total[k] = states[0][k] + states[1][k];
    }
    const auto path = scratch("profile.csv");
    const MassRow row = write_profile_csv(path, g, states, total, 0.5);
    CHECK(row.t == 0.5);
    CHECK(row.states[0] == Approx(trapezoid(g, states[0])));
    CHECK(row.total == Approx(trapezoid(g, total)));

    std::istringstream in(slurp(path));
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,state0,state1,total");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 16);
    CHECK(slurp(path) == profile_csv_text(g, states, total));
}

TEST_CASE("2D profile is row-major with x outer") {
    const Grid1D a(16, 0.0, 1.0);
    const Grid2D g(a, a);
    std::vector<std::vector<double>> states(1, std::vector<double>(g.size()));
    for (std::size_t i = 0; i < 16; ++i) {
        for (std::size_t j = 0; j < 16; ++j) states[0][g.index(i, j)] = static_cast<double>(i) + 0.01 * j;
    }
    const std::string text = profile_csv_text(g, states, states[0]);
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,y,state0,total");
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line.rfind(format_real(a.center(0)) + "," + format_real(a.center(1)) + ",", 0) == 0);
}

TEST_CASE("masses, tables and plot scripts") {
    write_masses_csv(scratch("masses.csv"), {{0.0, {0.25, 0.75}, 1.0}, {1.0, {0.5, 0.5}, 1.0}});
    CHECK(slurp(scratch("masses.csv")) == "t,state0,state1,total\n0,0.25,0.75,1\n1,0.5,0.5,1\n");

    write_table_csv(scratch("table.csv"), {"a", "b"}, {{"1", "2"}});
    CHECK(slurp(scratch("table.csv")) == "a,b\n1,2\n");

    write_gnuplot_1d(scratch("plot.gp"), "demo", {{"fpe_t1.csv", "t = 1"}}, "vstar.csv");
    const std::string gp = slurp(scratch("plot.gp"));
    CHECK(gp.find("'fpe_t1.csv' using 1:'total' with lines lw 2 dt 1") != std::string::npos);
    CHECK(gp.find("'vstar.csv' using 1:'total' with lines lw 2 dt 2") != std::string::npos);

    write_gnuplot_2d(scratch("plot2.gp"), "demo", {{"corr_t1.csv", "t = 1"}});
    CHECK(slurp(scratch("plot2.gp")).find("splot 'corr_t1.csv'") != std::string::npos);
}

TEST_CASE("unwritable destinations raise Io") {
    const Grid1D g(16, 0.0, 1.0);
    std::vector<double> v(16, 1.0);
    CHECK_THROWS_AS(write_profile_csv("/nonexistent/dir/x.csv", g, {v}, v), Error);
}
