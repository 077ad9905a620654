#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "erl/grid.hpp"

namespace erl {

/// One smooth space-time test function phi(t,x) = psi(t) * Phi(x) with
/// Phi a trigonometric mode cos/sin(pi k.x / L) and psi a C^1 temporal bump
/// cos^2(pi t / (2 t_support)) vanishing (with its derivative) at t_support.
struct SpaceTimeTestFunction {
    std::array<int, 3> k{0, 0, 0};
    bool use_sin = false;
    double t_support = 1.0;

    double spatial(const TorusGrid& grid, std::size_t cell) const {
        double arg = phase(grid, cell);
        return use_sin ? std::sin(arg) : std::cos(arg);
    }

    double spatial_grad(const TorusGrid& grid, std::size_t cell, int axis) const {
        double arg = phase(grid, cell);
        double kfac = std::numbers::pi * k[axis] / grid.half_period[axis];
        return use_sin ? kfac * std::cos(arg) : -kfac * std::sin(arg);
    }

    double temporal(double t) const {
        if (t >= t_support) return 0.0;
        double c = std::cos(0.5 * std::numbers::pi * t / t_support);
        return c * c;
    }

    double temporal_prime(double t) const {
        if (t >= t_support) return 0.0;
        double w = 0.5 * std::numbers::pi / t_support;
        return -2.0 * w * std::cos(w * t) * std::sin(w * t);
    }

  private:
    double phase(const TorusGrid& grid, std::size_t cell) const {
        auto mi = grid.multi_index(cell);
        double arg = 0.0;
        for (int a = 0; a < grid.dim; ++a)
            arg += std::numbers::pi * k[a] * grid.center(a, mi[a]) / grid.half_period[a];
        return arg;
    }
};

/// Family of test functions: all modes 0 < |k|_inf <= k_max (one representative
/// of each +-k pair, both cos and sin parts) times each temporal bump.
struct TestFunctionBasis {
    std::vector<SpaceTimeTestFunction> members;

    static TestFunctionBasis trig(const TorusGrid& grid, int k_max,
                                  const std::vector<double>& supports) {
        TestFunctionBasis basis;
        std::vector<std::array<int, 3>> modes;
        int k1 = grid.dim > 1 ? k_max : 0;
        int k2 = grid.dim > 2 ? k_max : 0;
        for (int kz = -k2; kz <= k2; ++kz)
            for (int ky = -k1; ky <= k1; ++ky)
                for (int kx = -k_max; kx <= k_max; ++kx) {
                    if (kx == 0 && ky == 0 && kz == 0) continue;
                    // keep one of {k, -k}: first nonzero component positive
                    if (kx < 0) continue;
                    if (kx == 0 && ky < 0) continue;
                    if (kx == 0 && ky == 0 && kz < 0) continue;
                    modes.push_back({kx, ky, kz});
                }
        for (double ts : supports)
            for (const auto& mode : modes)
                for (bool sin_part : {false, true})
                    basis.members.push_back({mode, sin_part, ts});
        return basis;
    }
};

}  // namespace erl
