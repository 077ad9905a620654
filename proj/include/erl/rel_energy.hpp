#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "erl/mollifier.hpp"
#include "erl/riemann.hpp"
#include "erl/sampled_field.hpp"
#include "erl/state.hpp"

namespace erl {

/// Per-axis spatial window |x_a| <= half_width[a]; non-positive entries mean
/// the full axis. Marginal cells are kept when their centers lie inside.
struct SpatialWindow {
    std::array<double, 3> half_width{0.0, 0.0, 0.0};

    static SpatialWindow full() { return {}; }
    static SpatialWindow box(double hw) { return {{hw, hw, hw}}; }

    bool contains(const TorusGrid& grid, std::size_t cell) const {
        auto mi = grid.multi_index(cell);
        for (int a = 0; a < grid.dim; ++a) {
            if (half_width[a] <= 0.0) continue;
            if (std::abs(grid.center(a, mi[a])) > half_width[a]) return false;
        }
        return true;
    }
};

/// Pointwise relative energy
///   1/2 rho |m/rho - U|^2 + P(rho) - P'(r)(rho - r) - P(r),
/// with the vacuum convention for rho = 0 (each kinetic term taken as its
/// rho -> 0 limit, which vanishes when m = 0). Requires r > 0.
inline double rel_energy_point(const PressureLaw& law, double rho, const double* m, double r,
                               const double* U, int dim) {
    if (r <= 0.0) throw std::domain_error("relative energy needs reference density r > 0");
    if (rho < 0.0) throw std::domain_error("relative energy at negative density");
    double kinetic;
    if (rho > 0.0) {
        double q2 = 0.0;
        for (int a = 0; a < dim; ++a) {
            double d = m[a] / rho - U[a];
            q2 += d * d;
        }
        kinetic = 0.5 * rho * q2;
    } else {
        double m2 = 0.0;
        for (int a = 0; a < dim; ++a) m2 += m[a] * m[a];
        kinetic = m2 == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    double bregman = law.potential(rho) - law.potential_prime(r) * (rho - r) - law.potential(r);
    return kinetic + bregman;
}

inline double rel_energy_point(const PressureLaw& law, double rho, double m, double r, double U) {
    return rel_energy_point(law, rho, &m, r, &U, 1);
}

struct RelEnergyField {
    std::vector<double> cell;  // zero outside the window
    double integral = 0.0;
};

/// Relative energy field and its windowed integral (midpoint sum).
inline RelEnergyField rel_energy(const TorusGrid& grid, const PressureLaw& law,
                                 const FluidState& state, const ScalarCells& r,
                                 const VectorCells& U,
                                 const SpatialWindow& window = SpatialWindow::full()) {
    RelEnergyField out;
    out.cell.assign(grid.num_cells(), 0.0);
    const std::size_t n = grid.num_cells();
    double sum = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        if (!window.contains(grid, c)) continue;
        double mc[3] = {0, 0, 0}, Uc[3] = {0, 0, 0};
        for (int a = 0; a < grid.dim; ++a) {
            mc[a] = state.m[a][c];
            Uc[a] = U[a][c];
        }
        out.cell[c] = rel_energy_point(law, state.rho[c], mc, r[c], Uc, grid.dim);
        sum += out.cell[c];
    }
    out.integral = sum * grid.cell_volume();
    return out;
}

/// Relative energy of a dissipative state: the energy E enters as given data
/// instead of being recomputed from (rho, m),
///   E - int m.U + 1/2 int rho |U|^2 - int P'(r) rho + int p(r).
/// E must refer to the same window as the field integrals.
inline double rel_energy_dissipative(const TorusGrid& grid, const PressureLaw& law,
                                     const ScalarCells& rho, const VectorCells& m, double energy,
                                     const ScalarCells& r, const VectorCells& U,
                                     const SpatialWindow& window = SpatialWindow::full()) {
    const std::size_t n = grid.num_cells();
    double acc = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        if (!window.contains(grid, c)) continue;
        double mu = 0.0, u2 = 0.0;
        for (int a = 0; a < grid.dim; ++a) {
            mu += m[a][c] * U[a][c];
            u2 += U[a][c] * U[a][c];
        }
        acc += -mu + 0.5 * rho[c] * u2 - law.potential_prime(r[c]) * rho[c] + law.pressure(r[c]);
    }
    return energy + acc * grid.cell_volume();
}

/// Reference pair (r, U) over time with its declared hypothesis data: uniform
/// density bounds, velocity bound, Besov exponents and the time margin delta.
struct ReferencePair {
    TorusGrid grid;
    PressureLaw law;
    std::vector<double> stamps;
    std::vector<ScalarCells> r;
    std::vector<VectorCells> U;

    double r_lo = 0.0, r_hi = 0.0, u_max = 0.0;
    double alpha = 0.0, p = 0.0;
    double delta = 0.0;

    double t_begin() const { return stamps.front(); }
    double t_end() const { return stamps.back(); }

    void interpolate(double t, ScalarCells& r_out, VectorCells& U_out) const {
        if (t < stamps.front() - 1e-12 || t > stamps.back() + 1e-12)
            throw std::out_of_range("time outside reference span");
        std::size_t hi = 1;
        while (hi + 1 < stamps.size() && stamps[hi] < t) ++hi;
        double w = std::clamp((t - stamps[hi - 1]) / (stamps[hi] - stamps[hi - 1]), 0.0, 1.0);
        const std::size_t n = grid.num_cells();
        r_out.resize(n);
        for (std::size_t c = 0; c < n; ++c)
            r_out[c] = (1.0 - w) * r[hi - 1][c] + w * r[hi][c];
        for (int a = 0; a < grid.dim; ++a) {
            U_out[a].resize(n);
            for (std::size_t c = 0; c < n; ++c)
                U_out[a][c] = (1.0 - w) * U[hi - 1][a][c] + w * U[hi][a][c];
        }
    }

    /// Reference as a trajectory of (r, r U), e.g. for weak-form residuals.
    Trajectory as_trajectory() const {
        Trajectory traj(grid, law);
        for (std::size_t i = 0; i < stamps.size(); ++i) {
            FluidState s = FluidState::zero(grid, stamps[i]);
            s.rho = r[i];
            for (int a = 0; a < grid.dim; ++a)
                for (std::size_t c = 0; c < grid.num_cells(); ++c)
                    s.m[a][c] = r[i][c] * U[i][a][c];
            traj.push(std::move(s));
        }
        return traj;
    }
};

/// Reference built from a trajectory: r = rho, U = m / rho.
inline ReferencePair reference_from_trajectory(const Trajectory& traj, double alpha, double p,
                                               double delta) {
    ReferencePair ref;
    ref.grid = traj.grid;
    ref.law = traj.law;
    ref.alpha = alpha;
    ref.p = p;
    ref.delta = delta;
    double rlo = 1e300, rhi = 0.0, umax = 0.0;
    for (const auto& s : traj.states) {
        ref.stamps.push_back(s.time);
        ref.r.push_back(s.rho);
        VectorCells U{};
        for (int a = 0; a < traj.grid.dim; ++a) {
            U[a].resize(traj.grid.num_cells());
            for (std::size_t c = 0; c < traj.grid.num_cells(); ++c) {
                U[a][c] = velocity_at(s, c, a);
                umax = std::max(umax, std::abs(U[a][c]));
            }
        }
        for (double v : s.rho) {
            rlo = std::min(rlo, v);
            rhi = std::max(rhi, v);
        }
        ref.U.push_back(std::move(U));
    }
    ref.r_lo = rlo;
    ref.r_hi = rhi;
    ref.u_max = umax;
    return ref;
}

/// 1-D reference sampled from an exact self-similar Riemann solution centered
/// at x = 0 (the t = 0 stamp samples the raw jump data).
inline ReferencePair reference_from_riemann(const TorusGrid& grid, const PressureLaw& law,
                                            const WaveStructure& ws,
                                            const std::vector<double>& stamps, double alpha,
                                            double p, double delta) {
    if (grid.dim != 1) throw std::invalid_argument("Riemann reference is one-dimensional");
    ReferencePair ref;
    ref.grid = grid;
    ref.law = law;
    ref.alpha = alpha;
    ref.p = p;
    ref.delta = delta;
    ref.stamps = stamps;
    double rlo = 1e300, rhi = 0.0, umax = 0.0;
    for (double t : stamps) {
        ScalarCells r(grid.num_cells());
        VectorCells U{};
        U[0].resize(grid.num_cells());
        for (int i = 0; i < grid.cells[0]; ++i) {
            double x = grid.center(0, i);
            auto [rho, u] = t > 0.0 ? sample(ws, x / t)
                                    : (x < 0.0 ? std::pair{ws.data.rho_l, ws.data.u_l}
                                               : std::pair{ws.data.rho_r, ws.data.u_r});
            r[i] = rho;
            U[0][i] = u;
            rlo = std::min(rlo, rho);
            rhi = std::max(rhi, rho);
            umax = std::max(umax, std::abs(u));
        }
        ref.r.push_back(std::move(r));
        ref.U.push_back(std::move(U));
    }
    ref.r_lo = rlo;
    ref.r_hi = rhi;
    ref.u_max = umax;
    return ref;
}

namespace detail {

/// Smallest eigenvalue of a symmetric dim x dim matrix (dim <= 3) by cyclic
/// Jacobi sweeps.
inline double min_eigenvalue_sym(double s[3][3], int dim) {
    if (dim == 1) return s[0][0];
    double a[3][3];
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a[i][j] = s[i][j];
    for (int sweep = 0; sweep < 32; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < dim; ++i)
            for (int j = i + 1; j < dim; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-30) break;
        for (int i = 0; i < dim; ++i)
            for (int j = i + 1; j < dim; ++j) {
                if (std::abs(a[i][j]) < 1e-300) continue;
                double theta = 0.5 * std::atan2(2.0 * a[i][j], a[j][j] - a[i][i]);
                double c = std::cos(theta), sn = std::sin(theta);
                for (int k = 0; k < dim; ++k) {
                    double aik = a[i][k], ajk = a[j][k];
                    a[i][k] = c * aik - sn * ajk;
                    a[j][k] = sn * aik + c * ajk;
                }
                for (int k = 0; k < dim; ++k) {
                    double aki = a[k][i], akj = a[k][j];
                    a[k][i] = c * aki - sn * akj;
                    a[k][j] = sn * aki + c * akj;
                }
            }
    }
    double lam = a[0][0];
    for (int i = 1; i < dim; ++i) lam = std::min(lam, a[i][i]);
    return lam;
}

}  // namespace detail

/// One-sided Lipschitz estimate at a single stamp:
///   D = max over cells of max(0, -lambda_min(sym grad [U]_eps)).
/// The velocity field is treated as interval data in space (kernel translates
/// never wrap a periodic seam), and the maximum is restricted to the window.
inline double estimate_D_at(const TorusGrid& grid, const VectorCells& U, double eps_d,
                            const SpatialWindow& window = SpatialWindow::full(),
                            bool periodic_space = false) {
    const int dim = grid.dim;
    std::vector<MollifyResult> comps;
    comps.reserve(dim);
    for (int a = 0; a < dim; ++a) {
        SampledField f = spatial_field(grid, U[a], periodic_space);
        comps.push_back(mollify_with_derivatives(f, make_mollifier(f, eps_d)));
    }
    const SampledField& ref = comps[0].value;
    double worst = 0.0;
    IndexBox::full(ref).for_each([&](const std::array<int, 4>& idx) {
        // map field index (axes reversed, possibly shrunk) back to a grid cell
        int gi[3] = {0, 0, 0};
        for (int fa = 0; fa < ref.dims(); ++fa) {
            int ga = dim - 1 - fa;
            double x = ref.coordinate(fa, idx[fa]);
            gi[ga] = static_cast<int>(std::lround((x - grid.center(ga, 0)) / grid.spacing(ga)));
        }
        std::size_t cell = grid.index(gi[0], gi[1], gi[2]);
        if (!window.contains(grid, cell)) return;
        double s[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
        for (int comp = 0; comp < dim; ++comp)
            for (int fa = 0; fa < ref.dims(); ++fa) {
                int ga = dim - 1 - fa;
                double d = comps[comp].derivative[fa].at(idx);
                s[ga][comp] += 0.5 * d;
                s[comp][ga] += 0.5 * d;
            }
        double lam = detail::min_eigenvalue_sym(s, dim);
        worst = std::max(worst, -lam);
    });
    return std::max(0.0, worst);
}

struct DSeries {
    std::vector<double> t;
    std::vector<double> d;
    double eps_d = 0.0;
    double total = 0.0;  // trapezoid integral of D over the stamps
};

inline DSeries estimate_D(const ReferencePair& ref, double eps_d,
                          const SpatialWindow& window = SpatialWindow::full(),
                          bool periodic_space = false) {
    DSeries s;
    s.eps_d = eps_d;
    for (std::size_t i = 0; i < ref.stamps.size(); ++i) {
        s.t.push_back(ref.stamps[i]);
        s.d.push_back(estimate_D_at(ref.grid, ref.U[i], eps_d, window, periodic_space));
    }
    for (std::size_t i = 0; i + 1 < s.d.size(); ++i)
        s.total += 0.5 * (s.d[i] + s.d[i + 1]) * (s.t[i + 1] - s.t[i]);
    return s;
}

/// Weak-form probe of the one-sided condition: minimum over nonnegative bump
/// test functions and unit directions of
///   int [ -xi.U (xi . grad phi) + D |xi|^2 phi ] dx.
/// Nonnegative values (up to quadrature error) are consistent with D.
inline double one_sided_weak_min(const TorusGrid& grid, const VectorCells& U, double d_value,
                                 int centers_per_axis = 6) {
    const int dim = grid.dim;
    std::vector<std::array<double, 3>> dirs;
    for (int a = 0; a < dim; ++a) {
        std::array<double, 3> e{0, 0, 0};
        e[a] = 1.0;
        dirs.push_back(e);
        e[a] = -1.0;
        dirs.push_back(e);
    }
    if (dim == 2) dirs.push_back({std::sqrt(0.5), std::sqrt(0.5), 0.0});
    if (dim == 3) dirs.push_back({std::sqrt(1.0 / 3), std::sqrt(1.0 / 3), std::sqrt(1.0 / 3)});

    double worst = std::numeric_limits<double>::infinity();
    const std::size_t n = grid.num_cells();
    for (int ic = 0; ic < centers_per_axis; ++ic) {
        double cx = -grid.half_period[0] + (ic + 0.5) * 2.0 * grid.half_period[0] / centers_per_axis;
        double width = grid.half_period[0] / 2.0;
        for (const auto& xi : dirs) {
            double acc = 0.0;
            for (std::size_t c = 0; c < n; ++c) {
                auto mi = grid.multi_index(c);
                double r2 = 0.0;
                double y[3] = {0, 0, 0};
                for (int a = 0; a < dim; ++a) {
                    double dxa = grid.center(a, mi[a]) - (a == 0 ? cx : 0.0);
                    double L = grid.half_period[a];  // shortest periodic image
                    dxa = dxa - std::round(dxa / (2.0 * L)) * 2.0 * L;
                    y[a] = dxa / width;
                    r2 += y[a] * y[a];
                }
                double phi = bump_profile(r2);
                if (phi == 0.0) continue;
                double xiU = 0.0, xigrad = 0.0;
                for (int a = 0; a < dim; ++a) {
                    xiU += xi[a] * U[a][c];
                    // grad of bump_profile(|y|^2): -2 y_a / (1-r2)^2 * phi / width
                    double dphi = phi * (-2.0 * y[a] / ((1.0 - r2) * (1.0 - r2))) / width;
                    xigrad += xi[a] * dphi;
                }
                acc += -xiU * xigrad + d_value * phi;
            }
            worst = std::min(worst, acc * grid.cell_volume());
        }
    }
    return worst;
}

struct GronwallResult {
    std::vector<double> t;
    std::vector<double> rel_energy;
    std::vector<double> bound;
    double slack = 0.0;
    double d_integral = 0.0;
    bool pass = false;
};

/// Discrete integral form of the Gronwall envelope:
///   B(t) = (relE(s) + slack) * exp(int_s^t D),
/// PASS iff relE(t) <= B(t) at every stored stamp (tiny rounding grace).
inline GronwallResult gronwall_certify(std::span<const double> t,
                                       std::span<const double> rel_e, std::span<const double> d,
                                       double slack) {
    if (t.size() != rel_e.size() || t.size() != d.size() || t.size() < 1)
        throw std::invalid_argument("gronwall series misaligned");
    for (double v : d)
        if (v < 0.0) throw std::invalid_argument("gronwall needs D >= 0");
    GronwallResult g;
    g.slack = slack;
    g.t.assign(t.begin(), t.end());
    g.rel_energy.assign(rel_e.begin(), rel_e.end());
    double acc = 0.0;
    g.pass = true;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i > 0) acc += 0.5 * (d[i] + d[i - 1]) * (t[i] - t[i - 1]);
        double b = (rel_e[0] + slack) * std::exp(acc);
        g.bound.push_back(b);
        if (rel_e[i] > b + 1e-12 * (1.0 + std::abs(b))) g.pass = false;
    }
    g.d_integral = acc;
    return g;
}

}  // namespace erl
