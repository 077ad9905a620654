#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "erl/certify.hpp"
#include "erl/r5_terms.hpp"
#include "erl/rel_energy.hpp"
#include "erl/weak_form.hpp"
#include "erl/young_measure.hpp"

namespace erl {

/// Barycenters, energy series and the underlying measure-valued data. The
/// energy is part of the solution: E(0-) = E0 is stored explicitly and is
/// distinct from the energy at the first stamp.
struct DissipativeSolution {
    PressureLaw law;
    YoungMeasureField measure;
    DefectMeasures defects;
    Trajectory barycenters;  // rho = <V; rho~>, m = <V; m~>
    std::vector<double> energy;
    double energy_initial = 0.0;  // E(0-)

    const TorusGrid& grid() const { return measure.grid; }
    const std::vector<double>& stamps() const { return measure.stamps; }
};

/// E(t) = int <V; 1/2 |m~|^2/rho~ + P(rho~)> + int dC_kin + int dC_int
/// on the given window.
inline std::vector<double> dissipative_energy(const YoungMeasureField& v,
                                              const DefectMeasures& defects,
                                              const PressureLaw& law,
                                              const SpatialWindow& window = SpatialWindow::full()) {
    std::vector<double> series;
    const TorusGrid& grid = v.grid;
    const std::size_t n = grid.num_cells();
    for (std::size_t i = 0; i < v.stamps.size(); ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            if (!window.contains(grid, c)) continue;
            for (const auto& a : v.atoms[i][c])
                acc += a.weight * energy_density(law, a.rho, a.m.data(), grid.dim);
            acc += defects.c_kin[i][c] + defects.c_int[i][c];
        }
        series.push_back(acc * grid.cell_volume());
    }
    return series;
}

inline DissipativeSolution make_dissipative(const PressureLaw& law, YoungMeasureField measure,
                                            DefectMeasures defects,
                                            std::optional<double> energy_initial = std::nullopt) {
    measure.validate();
    if (defects.algebra_residual() > 1e-10)
        throw std::invalid_argument("defect measures violate the constraint algebra");
    DissipativeSolution sol;
    sol.law = law;
    sol.measure = std::move(measure);
    sol.defects = std::move(defects);
    sol.barycenters = barycenter(sol.measure, law);
    sol.energy = dissipative_energy(sol.measure, sol.defects, law);
    sol.energy_initial = energy_initial.value_or(sol.energy.front());
    return sol;
}

/// Weak-form defects of the measure-valued continuity and momentum equations.
/// The momentum residual includes the convective defect against grad phi :
/// (xi x xi) and the pressure defect against div phi. The measure's own
/// invariants are re-checked before anything is integrated.
inline std::vector<WeakResidual> mvs_residuals(const DissipativeSolution& sol,
                                               const TestFunctionBasis& basis, double tau) {
    sol.measure.validate();
    if (sol.defects.algebra_residual() > 1e-10)
        throw std::invalid_argument("defect measures violate the constraint algebra");

    const TorusGrid& grid = sol.grid();
    const std::size_t n = grid.num_cells();
    const double vol = grid.cell_volume();
    const auto& stamps = sol.stamps();

    // barycentric part: identical machinery to the weak-solution residual
    std::vector<WeakResidual> base = weak_residual(sol.barycenters, basis, tau);

    // correction: replace <m (x) m / rho> and <p(rho)> moments of the
    // barycenter with the measure moments, and add the defect terms
    std::size_t i_tau = 0;
    for (std::size_t i = 1; i < stamps.size(); ++i)
        if (std::abs(stamps[i] - tau) < std::abs(stamps[i_tau] - tau)) i_tau = i;

    const PressureLaw& law = sol.law;
    for (std::size_t b = 0; b < basis.members.size(); ++b) {
        const auto& tf = basis.members[b];
        std::vector<double> grad[3];
        for (int a = 0; a < grid.dim; ++a) {
            grad[a].resize(n);
            for (std::size_t c = 0; c < n; ++c) grad[a][c] = tf.spatial_grad(grid, c, a);
        }
        for (int d = 0; d < grid.dim; ++d) {
            double integral = 0.0, prev = 0.0;
            for (std::size_t i = 0; i <= i_tau; ++i) {
                double psi = tf.temporal(stamps[i]);
                double row = 0.0;
                const FluidState& bary = sol.barycenters.states[i];
                for (std::size_t c = 0; c < n; ++c) {
                    // moment correction <m_d m_a / rho + delta p> - barycentric value
                    for (int a = 0; a < grid.dim; ++a) {
                        double moment = 0.0;
                        for (const auto& at : sol.measure.atoms[i][c])
                            moment += at.weight *
                                      (at.rho > 0.0 ? at.m[d] * at.m[a] / at.rho : 0.0);
                        double bary_val =
                            bary.rho[c] > 0.0 ? bary.m[d][c] * bary.m[a][c] / bary.rho[c] : 0.0;
                        row += (moment - bary_val) * grad[a][c];
                    }
                    double pmoment = 0.0;
                    for (const auto& at : sol.measure.atoms[i][c])
                        pmoment += at.weight * law.pressure(at.rho);
                    row += (pmoment - law.pressure(bary.rho[c])) * grad[d][c];

                    // defect terms
                    const auto& dir = sol.defects.directions;
                    for (std::size_t k = 0; k < dir.xi.size(); ++k)
                        row += dir.weight[k] * dir.xi[k][d] *
                               [&] {
                                   double xg = 0.0;
                                   for (int a = 0; a < grid.dim; ++a)
                                       xg += dir.xi[k][a] * grad[a][c];
                                   return xg;
                               }() *
                               sol.defects.c_conv[i][k][c];
                    row += sol.defects.c_press[i][c] * grad[d][c];
                }
                row *= vol * psi;
                if (i > 0) integral += 0.5 * (row + prev) * (stamps[i] - stamps[i - 1]);
                prev = row;
            }
            base[b].momentum[d] += integral;
        }
    }
    return base;
}

/// Right-hand-side blocks of the dissipative relative-energy inequality: the
/// measure quadratic form against grad [U], the pressure block with the
/// measure's pressure moment, the shared commutator blocks, and the two
/// concentration-defect blocks.
struct D6Terms {
    double quadratic = 0.0;
    double pressure = 0.0;
    R5Terms commutators;
    double defect_convective = 0.0;
    double defect_internal = 0.0;
};

inline D6Terms dissipative_rel_energy_terms(const DissipativeSolution& sol,
                                            const ReferencePair& ref, double eps, double s,
                                            double tau, const R5Config& cfg = {}) {
    const TorusGrid& grid = sol.grid();
    const PressureLaw& law = sol.law;
    const int dim = grid.dim;
    D6Terms out;
    out.commutators = rhs_terms_r5(sol.barycenters, ref, eps, s, tau, cfg);

    // Mollified reference on the measure's own stamps for the direct blocks.
    const auto& stamps = sol.stamps();
    detail::PairAt ref_at = [&](double t, ScalarCells& r, VectorCells& u) {
        ref.interpolate(t, r, u);
    };
    detail::PairAt state_at = [&](double t, ScalarCells& rho, VectorCells& m) {
        FluidState st = sol.barycenters.at_time(t);
        rho = std::move(st.rho);
        m = std::move(st.m);
    };
    auto data = detail::build_r5_data(grid, law, stamps, ref_at, state_at, cfg.spatial_periodic);
    Mollifier mol = make_mollifier(data.r, eps);
    auto mr = mollify_with_derivatives(data.r, mol);
    std::array<MollifyResult, 3> muf;
    for (int a = 0; a < dim; ++a) muf[a] = mollify_with_derivatives(data.u[a], mol);

    std::array<int, 4> off{0, 0, 0, 0};
    for (int fa = 0; fa < data.r.dims(); ++fa)
        off[fa] = static_cast<int>(std::lround(
            (mr.value.axis(fa).origin - data.r.axis(fa).origin) / data.r.axis(fa).spacing));
    auto faxis = [&](int a) { return 1 + (dim - 1 - a); };

    const double dt = stamps[1] - stamps[0];
    const double vol = grid.cell_volume();
    const auto& dir = sol.defects.directions;

    int i_lo = 0, i_hi = static_cast<int>(stamps.size()) - 1;
    while (i_lo < i_hi && (stamps[i_lo] < s - 1e-12 || i_lo < off[0])) ++i_lo;
    while (i_hi > i_lo &&
           (stamps[i_hi] > tau + 1e-12 || i_hi >= static_cast<int>(stamps.size()) - off[0]))
        --i_hi;
    if (i_lo >= i_hi) throw std::out_of_range("empty time range for dissipative terms");

    for (int i = i_lo; i <= i_hi; ++i) {
        double w_time = (i == i_lo || i == i_hi) ? 0.5 : 1.0;
        double quad = 0.0, press = 0.0, dconv = 0.0, dint = 0.0;
        for (std::size_t c = 0; c < grid.num_cells(); ++c) {
            auto mi = grid.multi_index(c);
            std::array<int, 4> idx{i, 0, 0, 0};
            for (int a = 0; a < dim; ++a) idx[1 + dim - 1 - a] = mi[a];
            bool interior = true;
            std::array<int, 4> j{};
            for (int fa = 0; fa < data.r.dims(); ++fa) {
                j[fa] = idx[fa] - off[fa];
                if (j[fa] < 0 || j[fa] >= mr.value.axis(fa).n) interior = false;
            }
            if (!interior) continue;
            for (int a = 0; a < dim; ++a) {
                double hw = cfg.window.half_width[a];
                if (hw > 0.0 && std::abs(grid.center(a, mi[a])) > hw) {
                    interior = false;
                    break;
                }
            }
            if (!interior) continue;

            double um[3], grad_u[3][3];
            double rm = mr.value.at(j);
            for (int a = 0; a < dim; ++a) {
                um[a] = muf[a].value.at(j);
                for (int b = 0; b < dim; ++b) grad_u[a][b] = muf[a].derivative[faxis(b)].at(j);
            }
            double div_u = 0.0;
            for (int a = 0; a < dim; ++a) div_u += grad_u[a][a];

            // measure quadratic form - int grad U : <rho~ w (x) w>
            double q = 0.0, pmom = 0.0;
            for (const auto& at : sol.measure.atoms[i][c]) {
                double w[3] = {0, 0, 0};
                for (int a = 0; a < dim; ++a)
                    w[a] = um[a] - (at.rho > 0.0 ? at.m[a] / at.rho : 0.0);
                for (int a = 0; a < dim; ++a)
                    for (int b = 0; b < dim; ++b)
                        q += at.weight * at.rho * grad_u[a][b] * w[b] * w[a];
                pmom += at.weight * law.pressure(at.rho);
            }
            quad += -q;

            double rho_bar = sol.barycenters.states[i].rho[c];
            press += -(pmom - law.pressure_prime(rm) * (rho_bar - rm) - law.pressure(rm)) * div_u;

            for (std::size_t k = 0; k < dir.xi.size(); ++k) {
                double xx = 0.0;
                for (int a = 0; a < dim; ++a)
                    for (int b = 0; b < dim; ++b)
                        xx += grad_u[a][b] * dir.xi[k][a] * dir.xi[k][b];
                dconv += -xx * dir.weight[k] * sol.defects.c_conv[i][k][c];
            }
            dint += -(law.gamma - 1.0) * div_u * sol.defects.c_int[i][c];
        }
        out.quadratic += quad * vol * dt * w_time;
        out.pressure += press * vol * dt * w_time;
        out.defect_convective += dconv * vol * dt * w_time;
        out.defect_internal += dint * vol * dt * w_time;
    }
    return out;
}

/// Certificate for the dissipative extension: the weak-solution checks on the
/// barycenters plus the constraint algebra, energy monotonicity, matching
/// initial energy, and the Gronwall envelope on the dissipative relative
/// energy (the stored E enters instead of the barycentric energy).
inline CertificateReport dt1_certify(const DissipativeSolution& sol, const ReferencePair& ref,
                                     const CertifyConfig& cfg = {}) {
    CertificateReport rep = uniqueness_certify(sol.barycenters, ref, cfg);

    double algebra = sol.defects.algebra_residual();
    rep.add("defect_algebra", algebra, 1e-12, algebra <= 1e-12,
            "constraint identities on the concentration measures");

    double worst_rise = 0.0;
    double e0 = sol.energy_initial;
    double prev = e0;
    for (double e : sol.energy) {
        worst_rise = std::max(worst_rise, e - prev);
        prev = e;
    }
    double tol_e = 1e-12 * std::max(1.0, std::abs(e0));
    rep.add("dissipative_energy_monotone", worst_rise, tol_e, worst_rise <= tol_e,
            "E non-increasing from E(0-)");

    // initial-energy agreement: E(0-) vs int [ 1/2 r0 |U0|^2 + P(r0) ]
    ScalarCells r0;
    VectorCells u0{};
    ref.interpolate(ref.t_begin(), r0, u0);
    double eref = 0.0;
    const TorusGrid& grid = sol.grid();
    for (std::size_t c = 0; c < grid.num_cells(); ++c) {
        double u2 = 0.0;
        for (int a = 0; a < grid.dim; ++a) u2 += u0[a][c] * u0[a][c];
        eref += 0.5 * r0[c] * u2 + sol.law.potential(r0[c]);
    }
    eref *= grid.cell_volume();
    double tol0 = cfg.tol_initial > 0.0 ? cfg.tol_initial : 1e-8;
    rep.add("initial_energy_match", std::abs(e0 - eref), tol0, std::abs(e0 - eref) <= tol0);

    // Gronwall on the dissipative relative energy, with windowed E
    double s_start = cfg.s_start >= 0.0 ? cfg.s_start : std::max(ref.delta, ref.t_begin());
    double t_end = std::min(sol.barycenters.t_end(), ref.t_end());
    std::vector<double> stamps(cfg.time_samples), rel(cfg.time_samples), dser(cfg.time_samples);
    std::vector<double> ewin = dissipative_energy(sol.measure, sol.defects, sol.law, cfg.window);
    ScalarCells rt;
    VectorCells ut{};
    for (int i = 0; i < cfg.time_samples; ++i) {
        stamps[i] = s_start + (t_end - s_start) * i / (cfg.time_samples - 1);
        FluidState st = sol.barycenters.at_time(stamps[i]);
        ref.interpolate(stamps[i], rt, ut);
        // windowed E interpolated to the stamp
        double e_at = 0.0;
        {
            const auto& ms = sol.stamps();
            std::size_t hi = 1;
            while (hi + 1 < ms.size() && ms[hi] < stamps[i]) ++hi;
            double w = std::clamp((stamps[i] - ms[hi - 1]) / (ms[hi] - ms[hi - 1]), 0.0, 1.0);
            e_at = (1.0 - w) * ewin[hi - 1] + w * ewin[hi];
        }
        rel[i] = rel_energy_dissipative(grid, sol.law, st.rho, st.m, e_at, rt, ut, cfg.window);
        dser[i] = estimate_D_at(grid, ut, cfg.eps_d > 0.0 ? cfg.eps_d : 4.0 * grid.spacing(0),
                                cfg.window, cfg.spatial_periodic);
    }
    double slack = cfg.slack >= 0.0 ? cfg.slack : std::max(rel.front(), 0.0);
    GronwallResult g = gronwall_certify(stamps, rel, dser, slack);
    rep.add("dissipative_gronwall", *std::max_element(rel.begin(), rel.end()), g.bound.back(),
            g.pass, "dissipative relative energy under its envelope");
    rep.t = stamps;
    rep.rel_energy = rel;
    rep.d_series = dser;
    rep.bound = g.bound;
    rep.slack = slack;
    return rep;
}

}  // namespace erl
