#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "erl/errors.hpp"
#include "erl/state.hpp"

namespace erl {

enum class FluxKind { local_lax_friedrichs, hll };

struct SchemeConfig {
    FluxKind flux = FluxKind::local_lax_friedrichs;
    double cfl = 0.45;
    double end_time = 0.0;
    int snapshot_stride = 1;
    double density_floor = 1e-12;  // below this the run aborts (vacuum breakdown)

    void validate() const {
        if (!(cfl > 0.0 && cfl < 1.0)) throw std::invalid_argument("cfl must lie in (0,1)");
        if (end_time <= 0.0) throw std::invalid_argument("end_time must be positive");
        if (snapshot_stride < 1) throw std::invalid_argument("snapshot_stride must be >= 1");
    }
};

namespace detail {

struct Cons {
    double rho;
    double m[3];
};

/// Flux of the conservative system along the given axis.
inline Cons physical_flux(const PressureLaw& law, const Cons& q, int axis, int dim) {
    double u = q.rho > 0.0 ? q.m[axis] / q.rho : 0.0;
    Cons f{};
    f.rho = q.m[axis];
    for (int a = 0; a < dim; ++a) f.m[a] = q.m[a] * u;
    f.m[axis] += law.pressure(q.rho);
    return f;
}

inline Cons numerical_flux(const PressureLaw& law, FluxKind kind, const Cons& ql, const Cons& qr,
                           int axis, int dim) {
    double ul = ql.rho > 0.0 ? ql.m[axis] / ql.rho : 0.0;
    double ur = qr.rho > 0.0 ? qr.m[axis] / qr.rho : 0.0;
    double cl = law.sound_speed(ql.rho);
    double cr = law.sound_speed(qr.rho);
    Cons fl = physical_flux(law, ql, axis, dim);
    Cons fr = physical_flux(law, qr, axis, dim);
    Cons f{};
    if (kind == FluxKind::local_lax_friedrichs) {
        double lam = std::max(std::abs(ul) + cl, std::abs(ur) + cr);
        f.rho = 0.5 * (fl.rho + fr.rho) - 0.5 * lam * (qr.rho - ql.rho);
        for (int a = 0; a < dim; ++a)
            f.m[a] = 0.5 * (fl.m[a] + fr.m[a]) - 0.5 * lam * (qr.m[a] - ql.m[a]);
        return f;
    }
    // HLL with Davis speed estimates
    double sl = std::min(ul - cl, ur - cr);
    double sr = std::max(ul + cl, ur + cr);
    if (sl >= 0.0) return fl;
    if (sr <= 0.0) return fr;
    double inv = 1.0 / (sr - sl);
    f.rho = (sr * fl.rho - sl * fr.rho + sl * sr * (qr.rho - ql.rho)) * inv;
    for (int a = 0; a < dim; ++a)
        f.m[a] = (sr * fl.m[a] - sl * fr.m[a] + sl * sr * (qr.m[a] - ql.m[a])) * inv;
    return f;
}

/// One conservative sweep along `axis` with step dt (periodic).
inline void sweep(const TorusGrid& grid, const PressureLaw& law, FluxKind kind, double dt,
                  int axis, FluidState& s, std::vector<Cons>& flux) {
    const std::size_t n = grid.num_cells();
    const double lam = dt / grid.spacing(axis);
    flux.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t cr = grid.neighbor(c, axis, +1);
        Cons ql{s.rho[c], {0, 0, 0}};
        Cons qr{s.rho[cr], {0, 0, 0}};
        for (int a = 0; a < grid.dim; ++a) {
            ql.m[a] = s.m[a][c];
            qr.m[a] = s.m[a][cr];
        }
        flux[c] = numerical_flux(law, kind, ql, qr, axis, grid.dim);
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t cl = grid.neighbor(c, axis, -1);
        s.rho[c] -= lam * (flux[c].rho - flux[cl].rho);
        for (int a = 0; a < grid.dim; ++a) s.m[a][c] -= lam * (flux[c].m[a] - flux[cl].m[a]);
    }
}

}  // namespace detail

/// Explicit finite-volume solve from t = 0 to cfg.end_time. The time step
/// obeys the CFL condition with wave speed |u| + c(rho) per axis; multi-D
/// uses dimension splitting with alternating sweep order. Snapshots are
/// stored every snapshot_stride steps plus the initial and final states.
inline Trajectory solve(const TorusGrid& grid, const PressureLaw& law, const FluidState& initial,
                        const SchemeConfig& cfg) {
    cfg.validate();
    initial.validate(grid);

    Trajectory traj(grid, law);
    FluidState s = initial;
    s.time = 0.0;
    traj.push(s);

    const std::size_t n = grid.num_cells();
    std::vector<detail::Cons> flux;
    long step = 0;
    double t = 0.0;
    while (t < cfg.end_time - 1e-14 * cfg.end_time) {
        double rate = 0.0;  // max over axes of wave speed / spacing
        for (int a = 0; a < grid.dim; ++a) {
            double smax = 0.0;
            for (std::size_t c = 0; c < n; ++c) {
                double u = velocity_at(s, c, a);
                smax = std::max(smax, std::abs(u) + law.sound_speed(s.rho[c]));
            }
            rate = std::max(rate, smax / grid.spacing(a));
        }
        if (rate <= 0.0) {  // fluid at rest with zero sound speed: nothing moves
            s.time = cfg.end_time;
            traj.push(s);
            break;
        }
        double dt = std::min(cfg.cfl / rate, cfg.end_time - t);
        if (dt < 1e-13 * cfg.end_time)
            throw CflCollapse("time step collapsed at t = " + std::to_string(t));

        // alternate sweep order between steps to balance the splitting
        if (step % 2 == 0)
            for (int a = 0; a < grid.dim; ++a) detail::sweep(grid, law, cfg.flux, dt, a, s, flux);
        else
            for (int a = grid.dim - 1; a >= 0; --a)
                detail::sweep(grid, law, cfg.flux, dt, a, s, flux);

        t += dt;
        s.time = t;
        ++step;
        for (std::size_t c = 0; c < n; ++c)
            if (s.rho[c] < cfg.density_floor)
                throw VacuumBreakdown("density fell below floor at t = " + std::to_string(t));
        if (step % cfg.snapshot_stride == 0 || t >= cfg.end_time - 1e-14 * cfg.end_time)
            traj.push(s);
    }
    return traj;
}

/// Total mass and momentum, for conservation checks.
inline std::array<double, 4> conserved_totals(const TorusGrid& grid, const FluidState& s) {
    std::array<double, 4> tot{0, 0, 0, 0};
    for (double r : s.rho) tot[0] += r;
    for (int a = 0; a < grid.dim; ++a)
        for (double v : s.m[a]) tot[1 + a] += v;
    for (double& v : tot) v *= grid.cell_volume();
    return tot;
}

}  // namespace erl
