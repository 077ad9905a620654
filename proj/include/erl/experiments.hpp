#pragma once

#include <string>
#include <vector>

#include "erl/certify.hpp"
#include "erl/config.hpp"
#include "erl/extension.hpp"
#include "erl/fv_solver.hpp"
#include "erl/mvs.hpp"
#include "erl/rates.hpp"
#include "erl/report.hpp"
#include "erl/snapshot_io.hpp"

namespace erl {

/// 1-D Riemann initial data: the jump sits at x = 0; on the torus its periodic
/// image puts the complementary jump at the seam x = +-L.
inline FluidState riemann_initial(const TorusGrid& grid, const RiemannData& data) {
    FluidState s = FluidState::zero(grid);
    for (int i = 0; i < grid.cells[0]; ++i) {
        double x = grid.center(0, i);
        s.rho[i] = x < 0.0 ? data.rho_l : data.rho_r;
        s.m[0][i] = x < 0.0 ? data.rho_l * data.u_l : data.rho_r * data.u_r;
    }
    return s;
}

inline FluidState analytic_initial(const TorusGrid& grid, const PressureLaw& law,
                                   const std::string& id) {
    FluidState s = FluidState::zero(grid);
    const std::size_t n = grid.num_cells();
    if (id == "constant") {
        for (std::size_t c = 0; c < n; ++c) s.rho[c] = 1.0;
    } else if (id == "smooth-wave") {
        for (std::size_t c = 0; c < n; ++c) {
            auto mi = grid.multi_index(c);
            double x = grid.center(0, mi[0]);
            s.rho[c] = 1.0 + 0.2 * std::sin(std::numbers::pi * x / grid.half_period[0]);
            s.m[0][c] = 0.1 * s.rho[c] * std::cos(std::numbers::pi * x / grid.half_period[0]);
        }
    } else {
        throw ConfigError("unknown key [initial] id value: " + id);
    }
    return s;
}

inline FluidState make_initial(const ExperimentConfig& cfg) {
    if (cfg.riemann) return riemann_initial(cfg.grid, *cfg.riemann);
    return analytic_initial(cfg.grid, cfg.law, cfg.initial_id);
}

inline Trajectory run_solve(const ExperimentConfig& cfg) {
    return solve(cfg.grid, cfg.law, make_initial(cfg), cfg.scheme);
}

/// Exact Riemann reference sampled to the grid at the same stamps as `traj`.
inline ReferencePair exact_reference(const ExperimentConfig& cfg, const Trajectory& traj) {
    if (!cfg.riemann) throw ConfigError("missing required key [riemann] rho_l (exact reference)");
    WaveStructure ws = solve_riemann(cfg.law, *cfg.riemann);
    std::vector<double> stamps;
    for (const auto& s : traj.states) stamps.push_back(s.time);
    return reference_from_riemann(cfg.grid, cfg.law, ws, stamps, cfg.alpha, cfg.p, cfg.delta);
}

inline CertifyConfig certify_config(const ExperimentConfig& cfg) {
    CertifyConfig cc;
    if (cfg.window_half > 0.0) cc.window = SpatialWindow::box(cfg.window_half);
    cc.s_start = cfg.s_start;
    cc.time_samples = cfg.time_samples;
    cc.eps_d = cfg.eps_d;
    cc.d_total_max = cfg.d_total_max;
    cc.tol_initial = cfg.tol_initial;
    cc.slack = cfg.slack;
    cc.besov_time_samples = cfg.besov_time_samples;
    cc.besov_eta_max = cfg.eta_max;
    cc.r5_eps = cfg.r5_eps;
    return cc;
}

inline json params_json(const ExperimentConfig& cfg) {
    json p{{"cells", cfg.grid.cells[0]},
           {"dim", cfg.grid.dim},
           {"a", cfg.law.a},
           {"gamma", cfg.law.gamma},
           {"cfl", cfg.scheme.cfl},
           {"end_time", cfg.scheme.end_time},
           {"alpha", cfg.alpha},
           {"p", cfg.p}};
    if (cfg.riemann)
        p["riemann"] = {cfg.riemann->rho_l, cfg.riemann->u_l, cfg.riemann->rho_r, cfg.riemann->u_r};
    return p;
}

/// The full weak-vs-reference certificate from one config.
inline json run_certify(const ExperimentConfig& cfg) {
    Trajectory weak = run_solve(cfg);
    ReferencePair ref = exact_reference(cfg, weak);
    CertificateReport rep = uniqueness_certify(weak, ref, certify_config(cfg));
    return report_json(rep, cfg.id, params_json(cfg));
}

/// Mollification-rate study on the canonical rough field.
inline json run_besov_rate(const ExperimentConfig& cfg) {
    if (cfg.eps_list.size() < 5)
        throw ConfigError("key [mollifier] eps_list needs >= 5 entries for the rate study");
    SampledField w = weierstrass_field_1d(cfg.grid.cells[0], cfg.alpha, cfg.grid.half_period[0]);
    RateTable t = rate_p4_p5(w, cfg.p, cfg.eps_list);
    bool pass = false;
    std::vector<LogLogFit> fits;
    std::vector<std::string> names;
    if (t.s4) {
        fits.push_back(*t.s4);
        names.push_back("s4");
    }
    if (t.s5) {
        fits.push_back(*t.s5);
        names.push_back("s5");
    }
    if (t.s4 && t.s5)
        pass = t.s4->slope >= cfg.alpha - 0.1 && t.s4->slope <= cfg.alpha + 0.15 &&
               t.s5->slope >= cfg.alpha - 1.0 - 0.1;
    return rate_report_json(cfg.id, params_json(cfg), names, fits, t.eps,
                            {t.mollification_error, t.gradient_norm},
                            {"mollification_error", "gradient_norm"}, pass);
}

/// Commutator-rate study (G(v) = v^2 on the canonical rough field).
inline json run_commutator_rate(const ExperimentConfig& cfg) {
    if (cfg.eps_list.size() < 3)
        throw ConfigError("key [mollifier] eps_list needs >= 3 entries for the commutator study");
    SampledField w = weierstrass_field_1d(cfg.grid.cells[0], cfg.alpha, cfg.grid.half_period[0]);
    CommutatorRateTable t = commutator_rate(square_map(), w, cfg.alpha, cfg.p, cfg.eps_list);
    bool pass = t.fit.slope >= 2.0 * cfg.alpha - 1.0 - 0.1 && t.constant_spread <= 10.0;
    return rate_report_json(cfg.id, params_json(cfg), {"commutator"}, {t.fit}, t.eps,
                            {t.norms, t.implied_constant}, {"norm", "implied_constant"}, pass);
}

/// Relative-energy series plus the commutator-block table for one experiment.
inline json run_relenergy(const ExperimentConfig& cfg) {
    Trajectory weak = run_solve(cfg);
    ReferencePair ref = exact_reference(cfg, weak);
    CertifyConfig cc = certify_config(cfg);
    if (cc.r5_eps.empty() && !cfg.eps_list.empty()) cc.r5_eps = cfg.eps_list;
    CertificateReport rep = uniqueness_certify(weak, ref, cc);
    return report_json(rep, cfg.id, params_json(cfg));
}

/// Torus embedding of the two-state far-field profile, with the weak residual
/// of the rescaled classical solution compared against a finite-volume run of
/// the same data at equal resolution.
inline json run_extend(const ExperimentConfig& cfg) {
    if (!cfg.riemann) throw ConfigError("missing required key [riemann] rho_l (extension profile)");
    ExtensionSpec spec;
    spec.far_radius = cfg.far_radius > 0.0 ? cfg.far_radius : 1.0;
    spec.torus_half_length = cfg.grid.half_period[0];
    spec.blend_width = cfg.blend_width > 0.0 ? cfg.blend_width : 1.0;
    spec.target_time = cfg.target_time > 0.0 ? cfg.target_time : cfg.scheme.end_time;

    // far-field profile: the exact Riemann solution at a fixed sampling time,
    // constant outside [-M, M]
    WaveStructure ws = solve_riemann(cfg.law, *cfg.riemann);
    const double t_prof = 0.25 * spec.far_radius /
                          std::max(1.0, std::abs(ws.w2.tail) + std::abs(ws.w1.head));
    LineProfile profile{
        [=](double x) { return sample(ws, x / t_prof).first; },
        [=](double x) { return sample(ws, x / t_prof).second; }};

    ExtensionResult ext = extend_to_torus(cfg.law, profile, spec, cfg.grid.cells[0]);

    double jump_r = seam_derivative_jump(TorusGrid::line(cfg.grid.cells[0], spec.torus_half_length),
                                         ext.r0);
    double jump_u = seam_derivative_jump(TorusGrid::line(cfg.grid.cells[0], spec.torus_half_length),
                                         ext.u0);

    Trajectory classical = ext.rescaled.as_trajectory();
    TestFunctionBasis basis = TestFunctionBasis::trig(
        ext.rescaled.grid, cfg.k_max, {0.6 * spec.target_time, 0.9 * spec.target_time});
    double res_classical = max_weak_residual(classical, basis, classical.t_end());

    SchemeConfig sc = cfg.scheme;
    sc.end_time = spec.target_time;
    FluidState init = FluidState::zero(ext.rescaled.grid);
    init.rho = ext.rescaled.r.front();
    for (std::size_t c = 0; c < init.rho.size(); ++c)
        init.m[0][c] = init.rho[c] * ext.rescaled.U.front()[0][c];
    Trajectory fv = solve(ext.rescaled.grid, cfg.law, init, sc);
    double res_fv = max_weak_residual(fv, basis, fv.t_end());

    CertificateReport rep;
    rep.experiment = cfg.id;
    double h = 2.0 * spec.torus_half_length / cfg.grid.cells[0];
    rep.add("seam_c1_density", jump_r, 64.0 * h, jump_r <= 64.0 * h,
            "one-sided derivative jump, O(h) scale");
    rep.add("seam_c1_velocity", jump_u, 64.0 * h, jump_u <= 64.0 * h);
    rep.add("rescaled_weak_residual", res_classical, 2.0 * res_fv, res_classical <= 2.0 * res_fv,
            "classical residual vs 2x the finite-volume residual");
    rep.t = ext.rescaled.stamps;
    rep.rel_energy.assign(rep.t.size(), 0.0);
    rep.d_series.assign(rep.t.size(), 0.0);
    rep.bound.assign(rep.t.size(), 0.0);
    json j = report_json(rep, cfg.id, params_json(cfg));
    j["params"]["epsilon"] = ext.short_time.epsilon;
    j["params"]["scale"] = ext.scale;
    j["params"]["residual_classical"] = res_classical;
    j["params"]["residual_fv"] = res_fv;
    return j;
}

/// The certificate lifted to measure-valued data: atomic measure of the
/// finite-volume run with zero defects against the exact reference.
inline json run_mvs_certify(const ExperimentConfig& cfg) {
    Trajectory weak = run_solve(cfg);
    ReferencePair ref = exact_reference(cfg, weak);
    YoungMeasureField v = YoungMeasureField::atomic(weak);
    DefectMeasures d = DefectMeasures::zero(cfg.grid, v.stamps, cfg.law.gamma);
    double e0 = total_energy(cfg.grid, cfg.law, weak.states.front());
    DissipativeSolution sol = make_dissipative(cfg.law, std::move(v), std::move(d), e0);
    CertificateReport rep = dt1_certify(sol, ref, certify_config(cfg));
    return report_json(rep, cfg.id, params_json(cfg));
}

}  // namespace erl
