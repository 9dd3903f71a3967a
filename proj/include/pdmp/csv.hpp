#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pdmp/grid.hpp"

namespace pdmp {

/// Shortest text that round-trips at 17 significant digits.
std::string format_real(double v);

/// Trapezoid rule over the cell centers of `grid` (tensor product in 2D).
double trapezoid(const Grid1D& grid, const std::vector<double>& values);
double trapezoid(const Grid2D& grid, const std::vector<double>& values);

/// Per-state and total masses of one profile, trapezoid rule.
struct MassRow {
    double t = 0.0;
    std::vector<double> states;
    double total = 0.0;
};

/// CSV text of a profile in the layout written below.
std::string profile_csv_text(const Grid1D& grid, const std::vector<std::vector<double>>& states,
                             const std::vector<double>& total);
std::string profile_csv_text(const Grid2D& grid, const std::vector<std::vector<double>>& states,
                             const std::vector<double>& total);

/// `x,state0,...,total`, one row per cell center. The masses of the columns as
/// written are recomputed from the text and must agree with the in-memory
/// trapezoid masses to 1e-10; the result is returned.
MassRow write_profile_csv(const std::filesystem::path& path, const Grid1D& grid,
                          const std::vector<std::vector<double>>& states, const std::vector<double>& total,
                          double t = 0.0);

/// `x,y,state0,...,total`, row-major with x outer.
MassRow write_profile_csv(const std::filesystem::path& path, const Grid2D& grid,
                          const std::vector<std::vector<double>>& states, const std::vector<double>& total,
                          double t = 0.0);

/// `t,state0,...,total`.
void write_masses_csv(const std::filesystem::path& path, const std::vector<MassRow>& rows);

/// Arbitrary table with a header row.
void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows);

struct PlotSeries {
    std::string file;
    std::string label;
};

/// gnuplot script drawing the `total` column of each profile as a solid line
/// and, if given, the reference density as a dashed line.
void write_gnuplot_1d(const std::filesystem::path& path, const std::string& title,
                      const std::vector<PlotSeries>& profiles, const std::string& reference_file = {});

/// gnuplot script with one heat map of the `total` column per file.
void write_gnuplot_2d(const std::filesystem::path& path, const std::string& title,
                      const std::vector<PlotSeries>& maps);

}  // namespace pdmp
