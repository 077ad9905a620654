#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "erl/grid.hpp"
#include "erl/state.hpp"

namespace erl {

struct YoungAtom {
    double weight = 1.0;
    double rho = 0.0;
    std::array<double, 3> m{0.0, 0.0, 0.0};
};

/// Per-cell, per-stamp finite atomic probability measures over state values.
struct YoungMeasureField {
    TorusGrid grid;
    std::vector<double> stamps;
    // atoms[stamp][cell] -> atom list
    std::vector<std::vector<std::vector<YoungAtom>>> atoms;

    void validate() const {
        for (const auto& snap : atoms)
            for (const auto& cell : snap) {
                double total = 0.0;
                for (const auto& a : cell) {
                    if (a.weight <= 0.0) throw std::invalid_argument("atom weights must be positive");
                    if (a.rho < 0.0) throw std::invalid_argument("atom density must be nonnegative");
                    if (a.rho == 0.0)
                        for (int d = 0; d < grid.dim; ++d)
                            if (a.m[d] != 0.0)
                                throw std::invalid_argument("vacuum atom with momentum");
                    total += a.weight;
                }
                if (std::abs(total - 1.0) > 1e-12)
                    throw std::invalid_argument("atom weights must sum to 1");
            }
    }

    /// Single-atom measure sitting on a trajectory's states.
    static YoungMeasureField atomic(const Trajectory& traj) {
        YoungMeasureField v;
        v.grid = traj.grid;
        const std::size_t n = traj.grid.num_cells();
        for (const auto& s : traj.states) {
            v.stamps.push_back(s.time);
            std::vector<std::vector<YoungAtom>> snap(n);
            for (std::size_t c = 0; c < n; ++c) {
                YoungAtom a;
                a.weight = 1.0;
                a.rho = s.rho[c];
                for (int d = 0; d < traj.grid.dim; ++d) a.m[d] = s.m[d][c];
                snap[c] = {a};
            }
            v.atoms.push_back(std::move(snap));
        }
        return v;
    }

    /// Two-atom mixture lambda(x) delta_{traj1} + (1-lambda(x)) delta_{traj2};
    /// both trajectories are interpolated to the given stamps.
    static YoungMeasureField mixture(const Trajectory& t1, const Trajectory& t2,
                                     const std::vector<double>& lambda,
                                     const std::vector<double>& stamps) {
        if (t1.grid.num_cells() != t2.grid.num_cells())
            throw std::invalid_argument("mixture needs a shared grid");
        YoungMeasureField v;
        v.grid = t1.grid;
        v.stamps = stamps;
        const std::size_t n = t1.grid.num_cells();
        for (double t : stamps) {
            FluidState a = t1.at_time(t);
            FluidState b = t2.at_time(t);
            std::vector<std::vector<YoungAtom>> snap(n);
            for (std::size_t c = 0; c < n; ++c) {
                double lam = lambda[c];
                YoungAtom a1{lam, a.rho[c], {0, 0, 0}};
                YoungAtom a2{1.0 - lam, b.rho[c], {0, 0, 0}};
                for (int d = 0; d < t1.grid.dim; ++d) {
                    a1.m[d] = a.m[d][c];
                    a2.m[d] = b.m[d][c];
                }
                if (lam >= 1.0 - 1e-15)
                    snap[c] = {YoungAtom{1.0, a1.rho, a1.m}};
                else if (lam <= 1e-15)
                    snap[c] = {YoungAtom{1.0, a2.rho, a2.m}};
                else
                    snap[c] = {a1, a2};
            }
            v.atoms.push_back(std::move(snap));
        }
        return v;
    }
};

/// Barycenters rho = <V; rho~>, m = <V; m~> as a trajectory on the measure grid.
inline Trajectory barycenter(const YoungMeasureField& v, const PressureLaw& law) {
    Trajectory traj(v.grid, law);
    const std::size_t n = v.grid.num_cells();
    for (std::size_t i = 0; i < v.stamps.size(); ++i) {
        FluidState s = FluidState::zero(v.grid, v.stamps[i]);
        for (std::size_t c = 0; c < n; ++c)
            for (const auto& a : v.atoms[i][c]) {
                s.rho[c] += a.weight * a.rho;
                for (int d = 0; d < v.grid.dim; ++d) s.m[d][c] += a.weight * a.m[d];
            }
        traj.push(std::move(s));
    }
    return traj;
}

/// Moment field <V; g(rho~, m~)> at one stamp. g must be defined on every atom;
/// an undefined value names the offending cell.
inline ScalarCells young_moment(const YoungMeasureField& v, std::size_t stamp,
                                const std::function<double(double, const double*)>& g) {
    const std::size_t n = v.grid.num_cells();
    ScalarCells out(n, 0.0);
    for (std::size_t c = 0; c < n; ++c)
        for (const auto& a : v.atoms[stamp][c]) {
            double val = g(a.rho, a.m.data());
            if (!std::isfinite(val))
                throw std::domain_error("observable undefined on an atom at cell " +
                                        std::to_string(c));
            out[c] += a.weight * val;
        }
    return out;
}

/// Quadrature nodes on the unit sphere S^{N-1}, exact on quadratic integrands
/// xi (x) xi; the weights sum to the sphere measure.
struct DirectionSet {
    std::vector<std::array<double, 3>> xi;
    std::vector<double> weight;

    static DirectionSet make(int dim) {
        DirectionSet s;
        if (dim == 1) {
            s.xi = {{-1, 0, 0}, {1, 0, 0}};
            s.weight = {1.0, 1.0};  // S^0 has measure 2
        } else if (dim == 2) {
            const int n = 32;
            for (int k = 0; k < n; ++k) {
                double th = 2.0 * std::numbers::pi * k / n;
                s.xi.push_back({std::cos(th), std::sin(th), 0.0});
                s.weight.push_back(2.0 * std::numbers::pi / n);
            }
        } else if (dim == 3) {
            // icosahedron vertices (12) plus edge midpoints (30), equal weights
            const double phi = 0.5 * (1.0 + std::sqrt(5.0));
            std::vector<std::array<double, 3>> verts;
            for (double s1 : {-1.0, 1.0})
                for (double s2 : {-phi, phi}) {
                    verts.push_back({0.0, s1, s2});
                    verts.push_back({s1, s2, 0.0});
                    verts.push_back({s2, 0.0, s1});
                }
            auto normalize = [](std::array<double, 3> v) {
                double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
                return std::array<double, 3>{v[0] / n, v[1] / n, v[2] / n};
            };
            for (auto& v : verts) v = normalize(v);
            std::vector<std::array<double, 3>> nodes = verts;
            double edge2 = 4.0 / (phi * phi + 1.0) + 0.4;  // squared edge length ~1.05^2
            for (std::size_t i = 0; i < verts.size(); ++i)
                for (std::size_t j = i + 1; j < verts.size(); ++j) {
                    double d2 = 0.0;
                    for (int k = 0; k < 3; ++k)
                        d2 += (verts[i][k] - verts[j][k]) * (verts[i][k] - verts[j][k]);
                    if (d2 < edge2)
                        nodes.push_back(normalize({0.5 * (verts[i][0] + verts[j][0]),
                                                   0.5 * (verts[i][1] + verts[j][1]),
                                                   0.5 * (verts[i][2] + verts[j][2])}));
                }
            s.xi = nodes;
            s.weight.assign(nodes.size(), 4.0 * std::numbers::pi / nodes.size());
        } else {
            throw std::invalid_argument("direction set needs dim in {1,2,3}");
        }
        return s;
    }
};

/// Concentration defect fields. The constructor derives the pressure defect
/// from the internal one and the kinetic defect from the direction quadrature
/// of the convective one, so the constraint algebra holds by construction.
struct DefectMeasures {
    TorusGrid grid;
    std::vector<double> stamps;
    double gamma = 2.0;
    DirectionSet directions;
    std::vector<ScalarCells> c_int;                 // per stamp
    std::vector<std::vector<ScalarCells>> c_conv;   // per stamp, per direction
    std::vector<ScalarCells> c_kin;                 // derived
    std::vector<ScalarCells> c_press;               // derived

    static DefectMeasures zero(const TorusGrid& grid, const std::vector<double>& stamps,
                               double gamma) {
        DefectMeasures d;
        d.grid = grid;
        d.stamps = stamps;
        d.gamma = gamma;
        d.directions = DirectionSet::make(grid.dim);
        const std::size_t n = grid.num_cells();
        for (std::size_t i = 0; i < stamps.size(); ++i) {
            d.c_int.emplace_back(n, 0.0);
            d.c_conv.emplace_back(d.directions.xi.size(), ScalarCells(n, 0.0));
        }
        d.derive();
        return d;
    }

    static DefectMeasures build(const TorusGrid& grid, const std::vector<double>& stamps,
                                double gamma, std::vector<ScalarCells> internal,
                                std::vector<std::vector<ScalarCells>> convective) {
        DefectMeasures d;
        d.grid = grid;
        d.stamps = stamps;
        d.gamma = gamma;
        d.directions = DirectionSet::make(grid.dim);
        d.c_int = std::move(internal);
        d.c_conv = std::move(convective);
        d.derive();
        return d;
    }

    /// Enforces c_press = (gamma - 1) c_int and c_kin = 1/2 quad(c_conv).
    void derive() {
        const std::size_t n = grid.num_cells();
        c_kin.assign(stamps.size(), ScalarCells(n, 0.0));
        c_press.assign(stamps.size(), ScalarCells(n, 0.0));
        for (std::size_t i = 0; i < stamps.size(); ++i)
            for (std::size_t c = 0; c < n; ++c) {
                double q = 0.0;
                for (std::size_t k = 0; k < directions.xi.size(); ++k)
                    q += directions.weight[k] * c_conv[i][k][c];
                c_kin[i][c] = 0.5 * q;
                c_press[i][c] = (gamma - 1.0) * c_int[i][c];
            }
    }

    /// Independent re-check of the constraint algebra; returns the largest
    /// violation (nonnegativity included).
    double algebra_residual() const {
        double worst = 0.0;
        const std::size_t n = grid.num_cells();
        for (std::size_t i = 0; i < stamps.size(); ++i)
            for (std::size_t c = 0; c < n; ++c) {
                double q = 0.0;
                for (std::size_t k = 0; k < directions.xi.size(); ++k) {
                    q += directions.weight[k] * c_conv[i][k][c];
                    worst = std::max(worst, -c_conv[i][k][c]);
                }
                worst = std::max(worst, std::abs(0.5 * q - c_kin[i][c]));
                worst = std::max(worst, std::abs(c_press[i][c] - (gamma - 1.0) * c_int[i][c]));
                worst = std::max(worst, -c_int[i][c]);
                worst = std::max(worst, -c_kin[i][c]);
            }
        return worst;
    }
};

}  // namespace erl
