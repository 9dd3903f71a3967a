#pragma once

#include <cstddef>

#include "pdmp/error.hpp"

namespace pdmp {

/// Uniform cell-centered grid on [lo, hi].
struct Grid1D {
    std::size_t n_cells = 0;
    double lo = 0.0;
    double hi = 1.0;

    Grid1D() = default;
    Grid1D(std::size_t n, double lo_, double hi_) : n_cells(n), lo(lo_), hi(hi_) {
        if (n_cells < 16) throw Error(ErrorCode::ConstraintViolation, "grid needs at least 16 cells");
        if (!(hi > lo)) throw Error(ErrorCode::ConstraintViolation, "grid needs hi > lo");
    }

    double dx() const { return (hi - lo) / static_cast<double>(n_cells); }
    double edge(std::size_t k) const { return lo + dx() * static_cast<double>(k); }
    double center(std::size_t k) const { return lo + dx() * (static_cast<double>(k) + 0.5); }
};

/// Tensor product grid, row-major with x as the outer index.
struct Grid2D {
    Grid1D x;
    Grid1D y;

    Grid2D() = default;
    Grid2D(Grid1D x_, Grid1D y_) : x(x_), y(y_) {}

    std::size_t size() const { return x.n_cells * y.n_cells; }
    std::size_t index(std::size_t ix, std::size_t iy) const { return ix * y.n_cells + iy; }
    double cell_area() const { return x.dx() * y.dx(); }
};

}  // namespace pdmp
