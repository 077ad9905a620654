#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "erl/besov.hpp"
#include "erl/r5_terms.hpp"
#include "erl/rel_energy.hpp"
#include "erl/weak_form.hpp"

namespace erl {

struct CheckEntry {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string note;
};

/// Structured pass/fail evidence: hypothesis checks with values and
/// thresholds, the relative-energy and envelope series, and the verdict.
/// The verdict is PASS exactly when every component check passes.
struct CertificateReport {
    std::string experiment;
    std::vector<CheckEntry> checks;
    std::vector<double> t, rel_energy, d_series, bound;
    std::optional<R5Sweep> r5;
    double slack = 0.0;

    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    std::string verdict() const { return pass() ? "PASS" : "FAIL"; }

    void add(std::string name, double value, double threshold, bool ok, std::string note = "") {
        checks.push_back({std::move(name), value, threshold, ok, std::move(note)});
    }

    const CheckEntry* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

struct CertifyConfig {
    SpatialWindow window = SpatialWindow::full();
    double s_start = -1.0;     // Gronwall start; < 0 means max(delta, first stamp)
    int time_samples = 65;     // evaluation stamps for the energy/D series
    double eps_d = 0.0;        // 0 means 4 h
    double d_total_max = 1e3;  // integrability cap for sum D dt
    double d_ratio_max = 3.0;  // fine/coarse divergence threshold
    double d_floor = 1e-8;     // fine-scale values below this count as zero
    double tol_initial = 1e-8; // L1 initial-data agreement
    double slack = -1.0;       // < 0 means the first-stamp relative energy
    double bound_tolerance = 1e-12;
    int besov_time_samples = 33;
    double besov_eta_max = 0.0;  // 0 means min extent / 4
    double besov_max = 1e6;
    double besov_stability_lo = 0.5;
    double besov_stability_hi = 2.0;
    bool spatial_periodic = false;
    std::vector<double> r5_eps;  // optional diagnostic sweep
};

namespace detail {

/// Space-time field of one reference component on [t0, t1], optionally taking
/// every `stride`-th spatial cell (for the two-level stability probe).
inline SampledField ref_space_time(const ReferencePair& ref, int comp /* -1 = density */,
                                   int n_stamps, double t0, double t1, bool spatial_periodic,
                                   int stride = 1) {
    const TorusGrid& g = ref.grid;
    std::vector<FieldAxis> axes;
    axes.push_back({n_stamps, (t1 - t0) / (n_stamps - 1), t0, false});
    for (int a = g.dim - 1; a >= 0; --a)
        axes.push_back({g.cells[a] / stride, g.spacing(a) * stride, g.center(a, 0),
                        spatial_periodic});
    SampledField f(axes);
    ScalarCells r;
    VectorCells u{};
    for (int i = 0; i < n_stamps; ++i) {
        ref.interpolate(t0 + (t1 - t0) * i / (n_stamps - 1), r, u);
        const ScalarCells& src = comp < 0 ? r : u[comp];
        IndexBox slab;
        slab.dims = f.dims();
        slab.lo[0] = i;
        slab.hi[0] = i + 1;
        for (int fa = 1; fa < f.dims(); ++fa) slab.hi[fa] = f.axis(fa).n;
        slab.for_each([&](const std::array<int, 4>& idx) {
            int gi[3] = {0, 0, 0};
            for (int fa = 1; fa < f.dims(); ++fa) gi[g.dim - 1 - (fa - 1)] = idx[fa] * stride;
            f.at(idx) = src[g.index(gi[0], gi[1], gi[2])];
        });
    }
    return f;
}

}  // namespace detail

/// End-to-end certificate: admissibility of the weak solution, uniform bounds
/// and Besov regularity of the reference, integrability of the one-sided
/// Lipschitz estimate, initial-data agreement, and the Gronwall envelope on
/// the relative energy. Failed hypotheses yield FAIL entries, never throws.
inline CertificateReport uniqueness_certify(const Trajectory& weak, const ReferencePair& ref,
                                            const CertifyConfig& cfg = {}) {
    CertificateReport rep;
    const TorusGrid& grid = weak.grid;
    const PressureLaw& law = weak.law;
    const double h = grid.spacing(0);
    const double eps_d = cfg.eps_d > 0.0 ? cfg.eps_d : 4.0 * h;

    // (1) admissibility of the weak solution (full torus)
    EnergySeries es = energy_monitor(weak);
    double max_rise = 0.0;
    for (std::size_t i = 0; i + 1 < es.energy.size(); ++i)
        max_rise = std::max(max_rise, es.energy[i + 1] - es.energy[i]);
    rep.add("admissible_energy", max_rise, es.tolerance, es.admissible,
            "max energy increment vs 1e-10 E(0)");

    // (2) declared uniform bounds, on the window
    double rmin = 1e300, rmax = 0.0, umax = 0.0;
    for (std::size_t i = 0; i < ref.stamps.size(); ++i)
        for (std::size_t c = 0; c < grid.num_cells(); ++c) {
            if (!cfg.window.contains(grid, c)) continue;
            rmin = std::min(rmin, ref.r[i][c]);
            rmax = std::max(rmax, ref.r[i][c]);
            for (int a = 0; a < grid.dim; ++a) umax = std::max(umax, std::abs(ref.U[i][a][c]));
        }
    const double bound_grace = 1e-10;
    rep.add("bound_r_lower", rmin, ref.r_lo, rmin >= ref.r_lo - bound_grace && ref.r_lo > 0.0);
    rep.add("bound_r_upper", rmax, ref.r_hi, rmax <= ref.r_hi + bound_grace);
    rep.add("bound_u_max", umax, ref.u_max, umax <= ref.u_max + bound_grace);

    // (3) Besov hypotheses: declared exponents and measured norms
    rep.add("exponent_alpha", ref.alpha, 0.5, ref.alpha > 0.5, "requires alpha > 1/2");
    double p_min = 4.0 * law.gamma / (law.gamma - 1.0);
    rep.add("exponent_p", ref.p, p_min, ref.p >= p_min - 1e-12, "requires p >= 4 gamma/(gamma-1)");

    double t_end = std::min(weak.t_end(), ref.t_end());
    double bes_t0 = std::max(ref.t_begin(), ref.delta);
    auto besov_of = [&](int comp, int stride) {
        SampledField f = detail::ref_space_time(ref, comp, cfg.besov_time_samples, bes_t0, t_end,
                                                cfg.spatial_periodic, stride);
        BesovWindow w = default_besov_window(f, ref.alpha, ref.p);
        if (cfg.besov_eta_max > 0.0) {
            w = BesovWindow{IndexBox::full(f), ref.alpha, ref.p, cfg.besov_eta_max};
            std::array<int, 4> margin{0, 0, 0, 0};
            for (int a = 0; a < f.dims(); ++a)
                if (!f.axis(a).periodic)
                    margin[a] =
                        static_cast<int>(std::floor(w.eta_max / f.axis(a).spacing)) + 1;
            w.q = w.q.shrunk(margin);
        }
        return besov_norm(f, w);
    };
    try {
        double br = besov_of(-1, 1), br2 = besov_of(-1, 2);
        rep.add("besov_r_finite", br, cfg.besov_max, std::isfinite(br) && br <= cfg.besov_max);
        double ratio = br2 > 0.0 ? br / br2 : 1.0;
        rep.add("besov_r_stable", ratio, cfg.besov_stability_hi,
                ratio >= cfg.besov_stability_lo && ratio <= cfg.besov_stability_hi,
                "fine/coarse norm ratio");
        double bu = 0.0, bu2 = 0.0;
        for (int a = 0; a < grid.dim; ++a) {
            bu = std::max(bu, besov_of(a, 1));
            bu2 = std::max(bu2, besov_of(a, 2));
        }
        rep.add("besov_u_finite", bu, cfg.besov_max, std::isfinite(bu) && bu <= cfg.besov_max);
        double ratio_u = bu2 > 0.0 ? bu / bu2 : 1.0;
        rep.add("besov_u_stable", ratio_u, cfg.besov_stability_hi,
                ratio_u >= cfg.besov_stability_lo && ratio_u <= cfg.besov_stability_hi,
                "fine/coarse norm ratio");
    } catch (const std::exception& e) {
        rep.add("besov_r_finite", std::nan(""), cfg.besov_max, false, e.what());
    }

    // evaluation stamps for the series
    double s_start = cfg.s_start >= 0.0 ? cfg.s_start : std::max(ref.delta, ref.t_begin());
    s_start = std::max(s_start, std::max(weak.t_begin(), ref.t_begin()));
    std::vector<double> stamps(cfg.time_samples);
    for (int i = 0; i < cfg.time_samples; ++i)
        stamps[i] = s_start + (t_end - s_start) * i / (cfg.time_samples - 1);

    // (4) one-sided Lipschitz estimate and its scale stability
    std::vector<double> d_series(stamps.size());
    ScalarCells r_t;
    VectorCells u_t{};
    for (std::size_t i = 0; i < stamps.size(); ++i) {
        ref.interpolate(stamps[i], r_t, u_t);
        d_series[i] = estimate_D_at(grid, u_t, eps_d, cfg.window, cfg.spatial_periodic);
    }
    double d_total = 0.0;
    for (std::size_t i = 0; i + 1 < stamps.size(); ++i)
        d_total += 0.5 * (d_series[i] + d_series[i + 1]) * (stamps[i + 1] - stamps[i]);

    double d_fine = 0.0, d_coarse = 0.0;  // divergence probe at a late stamp
    {
        double probe_t = stamps[stamps.size() / 2];
        ref.interpolate(probe_t, r_t, u_t);
        d_fine = estimate_D_at(grid, u_t, 2.0 * h, cfg.window, cfg.spatial_periodic);
        d_coarse = estimate_D_at(grid, u_t, 8.0 * h, cfg.window, cfg.spatial_periodic);
    }
    bool d_stable = d_fine <= cfg.d_floor || d_fine <= cfg.d_ratio_max * d_coarse;
    double d_ratio = d_fine <= cfg.d_floor ? 0.0 : (d_coarse > 0.0 ? d_fine / d_coarse : 1e300);
    rep.add("d_integrable", d_total, cfg.d_total_max, d_total <= cfg.d_total_max && d_stable,
            "sum D dt at eps_D = " + std::to_string(eps_d));
    rep.add("d_scale_stable", d_ratio, cfg.d_ratio_max, d_stable,
            "D(2h) / D(8h); divergence under refinement fails the hypothesis");

    // (5) initial-data agreement in L1 on the window
    {
        ScalarCells r0;
        VectorCells u0{};
        ref.interpolate(ref.t_begin(), r0, u0);
        double l1 = 0.0;
        for (std::size_t c = 0; c < grid.num_cells(); ++c) {
            if (!cfg.window.contains(grid, c)) continue;
            l1 += std::abs(weak.initial_rho[c] - r0[c]);
            for (int a = 0; a < grid.dim; ++a)
                l1 += std::abs(weak.initial_m[a][c] - r0[c] * u0[a][c]);
        }
        l1 *= grid.cell_volume();
        rep.add("initial_data_match", l1, cfg.tol_initial, l1 <= cfg.tol_initial);
    }

    // (6) Gronwall envelope on the relative energy
    std::vector<double> rel_series(stamps.size());
    for (std::size_t i = 0; i < stamps.size(); ++i) {
        FluidState st = weak.at_time(stamps[i]);
        ref.interpolate(stamps[i], r_t, u_t);
        rel_series[i] = rel_energy(grid, law, st, r_t, u_t, cfg.window).integral;
    }
    double slack = cfg.slack >= 0.0 ? cfg.slack : rel_series.front();
    GronwallResult g = gronwall_certify(stamps, rel_series, d_series, slack);
    rep.add("gronwall_envelope", *std::max_element(rel_series.begin(), rel_series.end()),
            g.bound.back(), g.pass, "relative energy under (relE(s)+slack) exp(int D)");
    // the earliest stored stamps should sit at the initial slack level
    rep.add("early_energy_floor", rel_series.front(), slack + cfg.bound_tolerance,
            rel_series.front() <= slack + cfg.bound_tolerance + 1e-12 * (1.0 + slack),
            "relative energy at the earliest stamp vs slack");

    rep.t = stamps;
    rep.rel_energy = rel_series;
    rep.d_series = d_series;
    rep.bound = g.bound;
    rep.slack = slack;

    if (!cfg.r5_eps.empty()) {
        R5Config r5cfg;
        r5cfg.window = cfg.window;
        r5cfg.spatial_periodic = cfg.spatial_periodic;
        r5cfg.time_samples = cfg.time_samples;
        try {
            rep.r5 = r5_sweep(weak, ref, cfg.r5_eps, s_start, t_end, r5cfg);
        } catch (const std::exception&) {
            // diagnostic only; the certificate stands without it
        }
    }
    return rep;
}

}  // namespace erl
