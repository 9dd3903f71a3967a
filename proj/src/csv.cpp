#include "pdmp/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pdmp/error.hpp"

namespace pdmp {

std::string format_real(double v) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

double trapezoid(const Grid1D& grid, const std::vector<double>& values) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < values.size(); ++k) s += 0.5 * (values[k] + values[k + 1]);
    return s * grid.dx();
}

double trapezoid(const Grid2D& grid, const std::vector<double>& values) {
    std::vector<double> rows(grid.x.n_cells);
    std::vector<double> line(grid.y.n_cells);
    for (std::size_t i = 0; i < grid.x.n_cells; ++i) {
        for (std::size_t j = 0; j < grid.y.n_cells; ++j) line[j] = values[grid.index(i, j)];
        rows[i] = trapezoid(grid.y, line);
    }
    return trapezoid(grid.x, rows);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    return out;
}

std::string header(std::size_t states, bool two_d) {
    std::string h = two_d ? "x,y" : "x";
    for (std::size_t i = 0; i < states; ++i) h += ",state" + std::to_string(i);
    return h + ",total\n";
}

// Parses column `col` of every data row of `text`.
std::vector<double> column(const std::string& text, std::size_t col) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::size_t start = 0;
        for (std::size_t c = 0; c < col; ++c) start = line.find(',', start) + 1;
        out.push_back(std::strtod(line.c_str() + start, nullptr));
    }
    return out;
}

template <class G>
MassRow finish(const std::filesystem::path& path, const G& grid, const std::string& text, std::size_t first_col,
               const std::vector<std::vector<double>>& states, const std::vector<double>& total, double t) {
    MassRow row;
    row.t = t;
    for (std::size_t i = 0; i <= states.size(); ++i) {
        const std::vector<double>& exact = i < states.size() ? states[i] : total;
        const double m = trapezoid(grid, exact);
        const double written = trapezoid(grid, column(text, first_col + i));
        if (!(std::abs(m - written) <= 1e-10)) {
            throw Error(ErrorCode::Io, path.string() + ": mass of column " + std::to_string(first_col + i) +
                                           " changed by " + format_real(m - written) + " when written");
        }
        if (i < states.size()) {
            row.states.push_back(m);
        } else {
            row.total = m;
        }
    }
    auto out = open_out(path);
    out << text;
    if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
    return row;
}

}  // namespace

std::string profile_csv_text(const Grid1D& grid, const std::vector<std::vector<double>>& states,
                             const std::vector<double>& total) {
    std::string text = header(states.size(), false);
    for (std::size_t k = 0; k < grid.n_cells; ++k) {
        text += format_real(grid.center(k));
        for (const auto& s : states) text += "," + format_real(s[k]);
        text += "," + format_real(total[k]) + "\n";
    }
    return text;
}

std::string profile_csv_text(const Grid2D& grid, const std::vector<std::vector<double>>& states,
                             const std::vector<double>& total) {
    std::string text = header(states.size(), true);
    for (std::size_t i = 0; i < grid.x.n_cells; ++i) {
        const std::string x = format_real(grid.x.center(i));
        for (std::size_t j = 0; j < grid.y.n_cells; ++j) {
            const std::size_t c = grid.index(i, j);
            text += x + "," + format_real(grid.y.center(j));
            for (const auto& s : states) text += "," + format_real(s[c]);
            text += "," + format_real(total[c]) + "\n";
        }
    }
    return text;
}

MassRow write_profile_csv(const std::filesystem::path& path, const Grid1D& grid,
                          const std::vector<std::vector<double>>& states, const std::vector<double>& total, double t) {
    return finish(path, grid, profile_csv_text(grid, states, total), 1, states, total, t);
}

MassRow write_profile_csv(const std::filesystem::path& path, const Grid2D& grid,
                          const std::vector<std::vector<double>>& states, const std::vector<double>& total, double t) {
    return finish(path, grid, profile_csv_text(grid, states, total), 2, states, total, t);
}

void write_masses_csv(const std::filesystem::path& path, const std::vector<MassRow>& rows) {
    auto out = open_out(path);
    out << "t";
    for (std::size_t i = 0; i < (rows.empty() ? 0 : rows.front().states.size()); ++i) out << ",state" << i;
    out << ",total\n";
    for (const auto& r : rows) {
        out << format_real(r.t);
        for (double m : r.states) out << "," << format_real(m);
        out << "," << format_real(r.total) << "\n";
    }
}

void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
    auto out = open_out(path);
    for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
    out << "\n";
    for (const auto& r : rows) {
        for (std::size_t k = 0; k < r.size(); ++k) out << (k ? "," : "") << r[k];
        out << "\n";
    }
}

void write_gnuplot_1d(const std::filesystem::path& path, const std::string& title,
                      const std::vector<PlotSeries>& profiles, const std::string& reference_file) {
    auto out = open_out(path);
    out << "set datafile separator ','\n"
        << "set key top right\n"
        << "set xlabel 'x'\n"
        << "set ylabel 'density'\n";
    for (const auto& p : profiles) {
        out << "set title '" << title << ", " << p.label << "'\n"
            << "plot '" << p.file << "' using 1:'total' with lines lw 2 dt 1 title 'V'";
        if (!reference_file.empty()) {
            out << ", \\\n     '" << reference_file << "' using 1:'total' with lines lw 2 dt 2 title 'V*'";
        }
        out << "\npause -1\n";
    }
}

void write_gnuplot_2d(const std::filesystem::path& path, const std::string& title,
                      const std::vector<PlotSeries>& maps) {
    auto out = open_out(path);
    out << "set datafile separator ','\n"
        << "set view map\n"
        << "set xlabel 'x'\n"
        << "set ylabel 'y'\n";
    for (const auto& m : maps) {
        out << "set title '" << title << ", " << m.label << "'\n"
            << "splot '" << m.file << "' using 1:2:'total' with points pt 5 ps 0.5 palette notitle\n"
            << "pause -1\n";
    }
}

}  // namespace pdmp
