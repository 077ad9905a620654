#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>

namespace erl {

/// Uniform cell-centered grid on a flat torus  Prod_i [-L_i, L_i)  with
/// periodic index arithmetic on every axis. Cell width on axis a is
/// 2 L_a / cells_a; linear indices are row-major with axis 0 fastest.
struct TorusGrid {
    int dim = 1;
    std::array<int, 3> cells{2, 1, 1};
    std::array<double, 3> half_period{1.0, 1.0, 1.0};

    TorusGrid() = default;

    TorusGrid(int dimension, std::array<int, 3> cells_per_axis,
              std::array<double, 3> half_periods)
        : dim(dimension), cells(cells_per_axis), half_period(half_periods) {
        if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
        for (int a = 0; a < dim; ++a) {
            if (cells[a] < 2) throw std::invalid_argument("grid needs at least 2 cells per axis");
            if (half_period[a] <= 0.0) throw std::invalid_argument("grid half-period must be positive");
        }
        for (int a = dim; a < 3; ++a) {
            cells[a] = 1;
            half_period[a] = 1.0;
        }
    }

    static TorusGrid line(int n, double half_length = 1.0) {
        return TorusGrid(1, {n, 1, 1}, {half_length, 1.0, 1.0});
    }

    double spacing(int a) const { return 2.0 * half_period[a] / cells[a]; }

    double cell_volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= spacing(a);
        return v;
    }

    double volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= 2.0 * half_period[a];
        return v;
    }

    std::size_t num_cells() const {
        std::size_t n = 1;
        for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(cells[a]);
        return n;
    }

    /// Periodic wrap of an axis index; shifting by cells[a] is the identity.
    int wrap(int a, int i) const {
        int n = cells[a];
        int r = i % n;
        return r < 0 ? r + n : r;
    }

    /// Cell-center coordinate.
    double center(int a, int i) const {
        return -half_period[a] + (i + 0.5) * spacing(a);
    }

    std::size_t index(int i, int j = 0, int k = 0) const {
        return (static_cast<std::size_t>(k) * cells[1] + j) * cells[0] + i;
    }

    std::array<int, 3> multi_index(std::size_t lin) const {
        int i = static_cast<int>(lin % cells[0]);
        std::size_t rest = lin / cells[0];
        int j = static_cast<int>(rest % cells[1]);
        int k = static_cast<int>(rest / cells[1]);
        return {i, j, k};
    }

    /// Linear index of the cell shifted by `shift` cells along axis a (wraps).
    std::size_t neighbor(std::size_t lin, int a, int shift) const {
        auto mi = multi_index(lin);
        mi[a] = wrap(a, mi[a] + shift);
        return index(mi[0], mi[1], mi[2]);
    }

    bool operator==(const TorusGrid&) const = default;
};

}  // namespace erl
