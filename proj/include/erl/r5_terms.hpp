#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "erl/mollifier.hpp"
#include "erl/rel_energy.hpp"
#include "erl/sampled_field.hpp"
#include "erl/state.hpp"

namespace erl {

/// Reference fields sampled per cell at one time together with their analytic
/// derivatives; grad_u[a][b] holds d U_a / d x_b.
struct RefSample {
    ScalarCells r, dr_dt;
    std::array<ScalarCells, 3> grad_r;
    std::array<ScalarCells, 3> u, du_dt;
    std::array<std::array<ScalarCells, 3>, 3> grad_u;
};

/// Spatial integral of the relative-energy inequality right-hand side in its
/// direct form: gradient terms of (r, U) against the state (rho, m),
///   (rho U - m).dU/dt + grad U : (w x m) + (p(r) - p(rho)) div U
///   + (r - rho) d/dt P'(r) + (r U - m).grad P'(r),  w = U - m/rho.
inline double rhs_i6_spatial(const TorusGrid& grid, const PressureLaw& law,
                             const FluidState& state, const RefSample& ref,
                             const SpatialWindow& window = SpatialWindow::full()) {
    const std::size_t n = grid.num_cells();
    const int dim = grid.dim;
    double acc = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        if (!window.contains(grid, c)) continue;
        double rho = state.rho[c];
        double r = ref.r[c];
        double div_u = 0.0;
        for (int a = 0; a < dim; ++a) div_u += ref.grad_u[a][a][c];
        double t1 = 0.0, t2 = 0.0, t5 = 0.0;
        for (int a = 0; a < dim; ++a) {
            double w_a = ref.u[a][c] - velocity_at(state, c, a);
            t1 += (rho * ref.u[a][c] - state.m[a][c]) * ref.du_dt[a][c];
            for (int b = 0; b < dim; ++b) t2 += state.m[b][c] * ref.grad_u[a][b][c] * w_a;
            t5 += (r * ref.u[a][c] - state.m[a][c]) * law.potential_second(r) * ref.grad_r[a][c];
        }
        double t3 = (law.pressure(r) - law.pressure(rho)) * div_u;
        double t4 = (r - rho) * law.potential_second(r) * ref.dr_dt[c];
        acc += t1 + t2 + t3 + t4 + t5;
    }
    return acc * grid.cell_volume();
}

/// The same right-hand side in residual form: quadratic and pressure terms
/// plus the field equations of (r, U) tested against relative quantities.
inline double rhs_r1_spatial(const TorusGrid& grid, const PressureLaw& law,
                             const FluidState& state, const RefSample& ref,
                             const SpatialWindow& window = SpatialWindow::full()) {
    const std::size_t n = grid.num_cells();
    const int dim = grid.dim;
    double acc = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        if (!window.contains(grid, c)) continue;
        double rho = state.rho[c];
        double r = ref.r[c];
        double div_u = 0.0;
        for (int a = 0; a < dim; ++a) div_u += ref.grad_u[a][a][c];

        double quad = 0.0;
        for (int a = 0; a < dim; ++a) {
            double w_a = ref.u[a][c] - velocity_at(state, c, a);
            for (int b = 0; b < dim; ++b) {
                double w_b = ref.u[b][c] - velocity_at(state, c, b);
                quad += w_b * ref.grad_u[a][b][c] * w_a;
            }
        }
        double s1 = -rho * quad;
        double s2 = -(law.pressure(rho) - law.pressure_prime(r) * (rho - r) - law.pressure(r)) *
                    div_u;

        double div_ru = 0.0;
        for (int a = 0; a < dim; ++a)
            div_ru += ref.grad_r[a][c] * ref.u[a][c] + r * ref.grad_u[a][a][c];

        double s3 = 0.0;
        for (int a = 0; a < dim; ++a) {
            double mom_residual = ref.dr_dt[c] * ref.u[a][c] + r * ref.du_dt[a][c];
            for (int b = 0; b < dim; ++b)
                mom_residual += ref.grad_r[b][c] * ref.u[a][c] * ref.u[b][c] +
                                r * ref.grad_u[a][b][c] * ref.u[b][c] +
                                r * ref.u[a][c] * ref.grad_u[b][b][c];
            mom_residual += law.pressure_prime(r) * ref.grad_r[a][c];
            s3 += mom_residual * (rho * ref.u[a][c] - state.m[a][c]) / r;
        }

        double cont_residual = ref.dr_dt[c] + div_ru;
        double bracket = (1.0 - rho / r) * law.pressure_prime(r);
        for (int a = 0; a < dim; ++a)
            bracket += ref.u[a][c] * (state.m[a][c] - rho * ref.u[a][c]) / r;
        double s4 = cont_residual * bracket;

        acc += s1 + s2 + s3 + s4;
    }
    return acc * grid.cell_volume();
}

/// The three commutator blocks of the regularized inequality, integrated over
/// [s, tau] x window: the convective flux block, the time-derivative block and
/// the continuity block. Mollified reference quantities and their derivatives
/// come from kernel convolutions only (no finite differencing of fields).
struct R5Terms {
    double convective = 0.0;
    double time_derivative = 0.0;
    double continuity = 0.0;

    double max_abs() const {
        return std::max({std::abs(convective), std::abs(time_derivative), std::abs(continuity)});
    }
};

struct R5Config {
    int time_samples = 65;
    bool spatial_periodic = false;
    SpatialWindow window = SpatialWindow::full();
};

namespace detail {

struct R5Data {
    TorusGrid grid;
    PressureLaw law;
    int dim = 1;
    std::vector<double> stamps;
    SampledField r;
    std::array<SampledField, 3> u, ru, rho_m;  // rho_m[0] unused; see rho below
    SampledField rho;
    std::array<SampledField, 3> m;
    std::array<std::array<SampledField, 3>, 3> flux;  // r U_a U_b + delta p(r)
};

using PairAt = std::function<void(double, ScalarCells&, VectorCells&)>;

inline R5Data build_r5_data(const TorusGrid& grid, const PressureLaw& law,
                            std::span<const double> stamps, const PairAt& ref_at,
                            const PairAt& state_at, bool spatial_periodic) {
    R5Data d;
    d.grid = grid;
    d.law = law;
    d.dim = grid.dim;
    d.stamps.assign(stamps.begin(), stamps.end());
    const int nt = static_cast<int>(stamps.size());
    if (nt < 2) throw std::invalid_argument("need at least two stamps");

    std::vector<FieldAxis> axes;
    axes.push_back({nt, stamps[1] - stamps[0], stamps[0], false});
    for (int a = grid.dim - 1; a >= 0; --a)
        axes.push_back({grid.cells[a], grid.spacing(a), grid.center(a, 0), spatial_periodic});

    auto blank = [&] { return SampledField(axes); };
    d.r = blank();
    d.rho = blank();
    for (int a = 0; a < d.dim; ++a) {
        d.u[a] = blank();
        d.ru[a] = blank();
        d.m[a] = blank();
        for (int b = 0; b < d.dim; ++b) d.flux[a][b] = blank();
    }

    ScalarCells r_cells;
    VectorCells u_cells{};
    ScalarCells rho_cells;
    VectorCells m_cells{};
    const std::size_t nc = grid.num_cells();
    for (int i = 0; i < nt; ++i) {
        ref_at(stamps[i], r_cells, u_cells);
        state_at(stamps[i], rho_cells, m_cells);
        for (std::size_t c = 0; c < nc; ++c) {
            auto mi = grid.multi_index(c);
            std::array<int, 4> idx{i, 0, 0, 0};
            for (int a = 0; a < grid.dim; ++a) idx[1 + grid.dim - 1 - a] = mi[a];
            double rv = r_cells[c];
            d.r.at(idx) = rv;
            d.rho.at(idx) = rho_cells[c];
            double pr = law.pressure(rv);
            for (int a = 0; a < d.dim; ++a) {
                d.u[a].at(idx) = u_cells[a][c];
                d.ru[a].at(idx) = rv * u_cells[a][c];
                d.m[a].at(idx) = m_cells[a][c];
                for (int b = 0; b < d.dim; ++b)
                    d.flux[a][b].at(idx) =
                        rv * u_cells[a][c] * u_cells[b][c] + (a == b ? pr : 0.0);
            }
        }
    }
    return d;
}

/// Evaluates the three blocks for one epsilon. `margin` fixes the common
/// integration domain (index margins on the full lattice) so a sweep compares
/// all scales over identical cells.
inline R5Terms eval_r5(const R5Data& d, double eps, double s, double tau,
                       const SpatialWindow& window, const std::array<int, 4>& margin) {
    Mollifier mol = make_mollifier(d.r, eps);
    const int dim = d.dim;
    const int fdims = d.r.dims();

    auto mr = mollify_with_derivatives(d.r, mol);
    std::array<MollifyResult, 3> mu;
    std::array<MollifyResult, 3> mru;
    std::array<std::array<MollifyResult, 3>, 3> mflux;
    for (int a = 0; a < dim; ++a) {
        mu[a] = mollify_with_derivatives(d.u[a], mol);
        mru[a] = mollify_with_derivatives(d.ru[a], mol);
        for (int b = 0; b < dim; ++b) mflux[a][b] = mollify_with_derivatives(d.flux[a][b], mol);
    }

    // offset of the mollified lattice inside the full lattice
    std::array<int, 4> off{0, 0, 0, 0};
    for (int fa = 0; fa < fdims; ++fa)
        off[fa] = static_cast<int>(std::lround(
            (mr.value.axis(fa).origin - d.r.axis(fa).origin) / d.r.axis(fa).spacing));

    // integration box in full-lattice indices
    IndexBox box;
    box.dims = fdims;
    for (int fa = 0; fa < fdims; ++fa) {
        box.lo[fa] = std::max(margin[fa], off[fa]);
        box.hi[fa] = std::min(d.r.axis(fa).n - margin[fa], d.r.axis(fa).n - off[fa]);
        if (box.lo[fa] >= box.hi[fa])
            throw std::invalid_argument("window too small for mollification scale");
    }
    // time restriction to [s, tau]
    {
        const FieldAxis& tax = d.r.axis(0);
        int lo = static_cast<int>(std::ceil((s - tax.origin) / tax.spacing - 1e-9));
        int hi = static_cast<int>(std::floor((tau - tax.origin) / tax.spacing + 1e-9)) + 1;
        box.lo[0] = std::max(box.lo[0], lo);
        box.hi[0] = std::min(box.hi[0], hi);
        if (box.lo[0] >= box.hi[0]) throw std::invalid_argument("empty time range for R5 terms");
    }

    const double dt = d.r.axis(0).spacing;
    double spatial_meas = 1.0;
    for (int fa = 1; fa < fdims; ++fa) spatial_meas *= d.r.axis(fa).spacing;

    // field axis of spatial direction a
    auto faxis = [&](int a) { return 1 + (dim - 1 - a); };

    R5Terms terms;
    box.for_each([&](const std::array<int, 4>& idx) {
        // spatial window test in physical coordinates
        for (int a = 0; a < dim; ++a) {
            double hw = window.half_width[a];
            if (hw > 0.0 && std::abs(d.r.coordinate(faxis(a), idx[faxis(a)])) > hw) return;
        }
        std::array<int, 4> j{};
        for (int fa = 0; fa < fdims; ++fa) j[fa] = idx[fa] - off[fa];

        double rm = mr.value.at(j);
        double um[3], dtu[3], dtr = mr.derivative[0].at(j);
        double dur[3];  // d r / d x_a
        double grad_u[3][3];
        for (int a = 0; a < dim; ++a) {
            um[a] = mu[a].value.at(j);
            dtu[a] = mu[a].derivative[0].at(j);
            dur[a] = mr.derivative[faxis(a)].at(j);
            for (int b = 0; b < dim; ++b) grad_u[a][b] = mu[a].derivative[faxis(b)].at(j);
        }
        double rho = d.rho.at(idx);
        double mvec[3];
        for (int a = 0; a < dim; ++a) mvec[a] = d.m[a].at(idx);

        double pp = d.law.pressure_prime(rm);

        double w_time = (idx[0] == box.lo[0] || idx[0] == box.hi[0] - 1) ? 0.5 : 1.0;
        double wgt = w_time * dt * spatial_meas;

        // convective block
        double conv = 0.0;
        for (int a = 0; a < dim; ++a) {
            double bracket = pp * dur[a];
            for (int b = 0; b < dim; ++b) {
                bracket += dur[b] * um[a] * um[b] + rm * grad_u[a][b] * um[b] +
                           rm * um[a] * grad_u[b][b];
                bracket -= mflux[a][b].derivative[faxis(b)].at(j);
            }
            conv += bracket * (rho * um[a] - mvec[a]) / rm;
        }
        terms.convective += conv * wgt;

        // time-derivative block
        double tder = 0.0;
        for (int a = 0; a < dim; ++a) {
            double bracket = dtr * um[a] + rm * dtu[a] - mru[a].derivative[0].at(j);
            tder += bracket * (rho * um[a] - mvec[a]) / rm;
        }
        terms.time_derivative += tder * wgt;

        // continuity block
        double cont = 0.0;
        for (int a = 0; a < dim; ++a)
            cont += dur[a] * um[a] + rm * grad_u[a][a] - mru[a].derivative[faxis(a)].at(j);
        double bracket = (1.0 - rho / rm) * pp;
        for (int a = 0; a < dim; ++a) bracket += um[a] * (mvec[a] - rho * um[a]) / rm;
        terms.continuity += cont * bracket * wgt;
    });
    return terms;
}

}  // namespace detail

/// Commutator blocks for one mollification scale; the weak state and the
/// reference are resampled to uniform stamps spanning their common range.
inline R5Terms rhs_terms_r5(const Trajectory& weak, const ReferencePair& ref, double eps,
                            double s, double tau, const R5Config& cfg = {}) {
    double t0 = std::max(weak.t_begin(), ref.t_begin());
    double t1 = std::min(weak.t_end(), ref.t_end());
    if (!(s >= t0 - 1e-12 && tau <= t1 + 1e-12 && s < tau))
        throw std::out_of_range("[s, tau] outside the common time span");
    std::vector<double> stamps(cfg.time_samples);
    for (int i = 0; i < cfg.time_samples; ++i)
        stamps[i] = t0 + (t1 - t0) * i / (cfg.time_samples - 1);

    detail::PairAt ref_at = [&](double t, ScalarCells& r, VectorCells& u) {
        ref.interpolate(t, r, u);
    };
    detail::PairAt state_at = [&](double t, ScalarCells& rho, VectorCells& m) {
        FluidState st = weak.at_time(t);
        rho = std::move(st.rho);
        m = std::move(st.m);
    };
    auto data = detail::build_r5_data(weak.grid, weak.law, stamps, ref_at, state_at,
                                      cfg.spatial_periodic);
    Mollifier mol = make_mollifier(data.r, eps);
    std::array<int, 4> margin{0, 0, 0, 0};
    for (int fa = 0; fa < data.r.dims(); ++fa)
        if (!data.r.axis(fa).periodic) margin[fa] = mol.radius(fa);
    return detail::eval_r5(data, eps, s, tau, cfg.window, margin);
}

struct R5Sweep {
    std::vector<double> eps;
    std::vector<R5Terms> terms;
};

/// Evaluates the blocks over a dyadic epsilon list on the common interior
/// domain of the largest scale, so the trend in epsilon is not confounded by
/// a changing integration region.
inline R5Sweep r5_sweep(const Trajectory& weak, const ReferencePair& ref,
                        std::span<const double> eps_list, double s, double tau,
                        const R5Config& cfg = {}) {
    double t0 = std::max(weak.t_begin(), ref.t_begin());
    double t1 = std::min(weak.t_end(), ref.t_end());
    std::vector<double> stamps(cfg.time_samples);
    for (int i = 0; i < cfg.time_samples; ++i)
        stamps[i] = t0 + (t1 - t0) * i / (cfg.time_samples - 1);

    detail::PairAt ref_at = [&](double t, ScalarCells& r, VectorCells& u) {
        ref.interpolate(t, r, u);
    };
    detail::PairAt state_at = [&](double t, ScalarCells& rho, VectorCells& m) {
        FluidState st = weak.at_time(t);
        rho = std::move(st.rho);
        m = std::move(st.m);
    };
    auto data = detail::build_r5_data(weak.grid, weak.law, stamps, ref_at, state_at,
                                      cfg.spatial_periodic);
    double eps_max = 0.0;
    for (double e : eps_list) eps_max = std::max(eps_max, e);
    Mollifier coarse = make_mollifier(data.r, eps_max);
    std::array<int, 4> margin{0, 0, 0, 0};
    for (int fa = 0; fa < data.r.dims(); ++fa)
        if (!data.r.axis(fa).periodic) margin[fa] = coarse.radius(fa);

    R5Sweep sweep;
    for (double eps : eps_list) {
        sweep.eps.push_back(eps);
        sweep.terms.push_back(detail::eval_r5(data, eps, s, tau, cfg.window, margin));
    }
    return sweep;
}

/// Decay verdict for one block series: each level within `wiggle` of monotone
/// decay, and no level above `wiggle` times the geometric prediction
/// extrapolated from the first ratio.
inline bool geometric_decay_ok(std::span<const double> values, double wiggle = 1.2) {
    if (values.size() < 2) return false;
    std::vector<double> v(values.begin(), values.end());
    for (double& x : v) x = std::abs(x);
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        if (v[i + 1] > wiggle * v[i]) return false;
    if (v[0] <= 0.0) return true;  // identically zero: already vanished
    double q = v[1] / v[0];
    if (q >= 1.0) return false;
    for (std::size_t k = 2; k < v.size(); ++k)
        if (v[k] > wiggle * v[0] * std::pow(q, static_cast<double>(k))) return false;
    return true;
}

}  // namespace erl
