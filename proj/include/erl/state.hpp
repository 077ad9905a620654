#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "erl/grid.hpp"
#include "erl/pressure.hpp"

namespace erl {

using ScalarCells = std::vector<double>;
using VectorCells = std::array<std::vector<double>, 3>;  // components 0..dim-1 used

/// Density and momentum on a torus grid at one time instant. rho >= 0
/// everywhere; wherever rho = 0 the momentum must vanish (vacuum convention).
struct FluidState {
    ScalarCells rho;
    VectorCells m;
    double time = 0.0;

    static FluidState zero(const TorusGrid& grid, double t = 0.0) {
        FluidState s;
        s.rho.assign(grid.num_cells(), 0.0);
        for (int a = 0; a < grid.dim; ++a) s.m[a].assign(grid.num_cells(), 0.0);
        s.time = t;
        return s;
    }

    void validate(const TorusGrid& grid) const {
        if (rho.size() != grid.num_cells()) throw std::invalid_argument("state/grid size mismatch");
        for (int a = 0; a < grid.dim; ++a)
            if (m[a].size() != grid.num_cells())
                throw std::invalid_argument("momentum/grid size mismatch");
        for (double r : rho)
            if (r < 0.0 || std::isnan(r)) throw std::invalid_argument("state has negative or NaN density");
    }
};

/// 1/2 |m|^2 / rho + P(rho). Vacuum cells (rho = 0, m = 0) evaluate to 0;
/// rho = 0 with m != 0 is reported as +infinity, never thrown.
inline double energy_density(const PressureLaw& law, double rho, const double* m, int dim) {
    if (rho < 0.0) throw std::domain_error("energy density at negative density");
    double m2 = 0.0;
    for (int a = 0; a < dim; ++a) m2 += m[a] * m[a];
    if (rho == 0.0) return m2 == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return 0.5 * m2 / rho + law.potential(rho);
}

inline double energy_density(const PressureLaw& law, double rho, double m1) {
    return energy_density(law, rho, &m1, 1);
}

/// Cell-volume-weighted sum of the energy density (midpoint rule on the
/// solver's own piecewise-constant representation). Propagates the
/// infinite-energy flag through the +inf value.
inline double total_energy(const TorusGrid& grid, const PressureLaw& law, const FluidState& s) {
    double sum = 0.0;
    const std::size_t n = grid.num_cells();
    for (std::size_t c = 0; c < n; ++c) {
        double mc[3] = {0, 0, 0};
        for (int a = 0; a < grid.dim; ++a) mc[a] = s.m[a][c];
        sum += energy_density(law, s.rho[c], mc, grid.dim);
    }
    return sum * grid.cell_volume();
}

/// Number of cells where rho = 0 but m != 0 (diagnostic for the vacuum flag).
inline std::size_t infinite_energy_cells(const TorusGrid& grid, const FluidState& s) {
    std::size_t count = 0;
    for (std::size_t c = 0; c < s.rho.size(); ++c) {
        if (s.rho[c] != 0.0) continue;
        for (int a = 0; a < grid.dim; ++a)
            if (s.m[a][c] != 0.0) {
                ++count;
                break;
            }
    }
    return count;
}

/// Time-ordered sequence of states sharing one grid and law, plus a copy of
/// the initial data.
struct Trajectory {
    TorusGrid grid;
    PressureLaw law;
    std::vector<FluidState> states;
    ScalarCells initial_rho;
    VectorCells initial_m;

    Trajectory() = default;
    Trajectory(const TorusGrid& g, const PressureLaw& l) : grid(g), law(l) {}

    void push(FluidState s) {
        if (!states.empty() && s.time <= states.back().time)
            throw std::invalid_argument("trajectory time stamps must be strictly increasing");
        if (states.empty()) {
            initial_rho = s.rho;
            initial_m = s.m;
        }
        states.push_back(std::move(s));
    }

    double t_begin() const { return states.front().time; }
    double t_end() const { return states.back().time; }

    bool covers(double t) const {
        return !states.empty() && t >= t_begin() - 1e-12 && t <= t_end() + 1e-12;
    }

    /// Linear interpolation in time, cell-wise.
    FluidState at_time(double t) const {
        if (!covers(t)) throw std::out_of_range("time outside trajectory span");
        if (t <= t_begin()) return states.front();
        if (t >= t_end()) return states.back();
        std::size_t hi = 1;
        while (states[hi].time < t) ++hi;
        const FluidState& s0 = states[hi - 1];
        const FluidState& s1 = states[hi];
        double w = (t - s0.time) / (s1.time - s0.time);
        FluidState out = FluidState::zero(grid, t);
        const std::size_t n = grid.num_cells();
        for (std::size_t c = 0; c < n; ++c) out.rho[c] = (1.0 - w) * s0.rho[c] + w * s1.rho[c];
        for (int a = 0; a < grid.dim; ++a)
            for (std::size_t c = 0; c < n; ++c) out.m[a][c] = (1.0 - w) * s0.m[a][c] + w * s1.m[a][c];
        return out;
    }

    /// States at n uniformly spaced stamps spanning [t0, t1].
    std::vector<FluidState> resample_uniform(int n, double t0, double t1) const {
        if (n < 2) throw std::invalid_argument("resample needs at least 2 stamps");
        std::vector<FluidState> out;
        out.reserve(n);
        for (int i = 0; i < n; ++i) out.push_back(at_time(t0 + (t1 - t0) * i / (n - 1)));
        return out;
    }
};

inline double velocity_at(const FluidState& s, std::size_t cell, int axis) {
    return s.rho[cell] > 0.0 ? s.m[axis][cell] / s.rho[cell] : 0.0;
}

}  // namespace erl
