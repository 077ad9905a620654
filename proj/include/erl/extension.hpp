#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "erl/errors.hpp"
#include "erl/rel_energy.hpp"
#include "erl/riemann.hpp"

namespace erl {

/// Parameters of the torus embedding of far-field data: the profile is given
/// on [-M, M] (constant outside), the torus has half-length K > M, and the
/// far fields are swapped back across a C^1 blend of width < K - M centered
/// at the seam.
struct ExtensionSpec {
    double far_radius = 1.0;        // M
    double torus_half_length = 4.0; // K
    double target_time = 1.0;       // horizon after rescaling
    double blend_width = 1.0;
    double epsilon_min = 1e-5;      // smallest admissible short-time horizon

    void validate() const {
        if (!(torus_half_length > far_radius))
            throw std::invalid_argument("extension requires K > M");
        if (!(blend_width > 0.0 && blend_width < torus_half_length - far_radius))
            throw std::invalid_argument("extension requires 0 < blend width < K - M");
        if (target_time <= 0.0) throw std::invalid_argument("extension target time must be positive");
    }
};

/// 1-D profile on the line, constant outside [-M, M].
struct LineProfile {
    std::function<double(double)> r, u;
};

struct ClassicalSolution {
    TorusGrid grid;
    PressureLaw law;
    double epsilon = 0.0;  // time horizon of the short-time solve
    std::vector<double> stamps;
    std::vector<ScalarCells> r;
    std::vector<ScalarCells> u;
};

struct ExtensionResult {
    ScalarCells r0, u0;            // C^1 periodic initial data on [-K, K)
    ClassicalSolution short_time;  // characteristic solve on [0, epsilon]
    ReferencePair rescaled;        // (r, U) on the enlarged torus over [0, T]
    double scale = 1.0;            // T / epsilon
};

namespace detail {

/// Quintic smoothstep: C^2 on [0,1] with vanishing endpoint derivatives,
/// monotone for ordered endpoints.
inline double smoothstep5(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

/// Periodic piecewise-linear interpolation of per-cell samples on [-K, K).
inline double sample_periodic(const std::vector<double>& v, double x, double half_len) {
    const int n = static_cast<int>(v.size());
    double h = 2.0 * half_len / n;
    double s = (x + half_len) / h - 0.5;
    double fl = std::floor(s);
    int i0 = static_cast<int>(fl);
    double w = s - fl;
    int a = ((i0 % n) + n) % n;
    int b = (a + 1) % n;
    return (1.0 - w) * v[a] + w * v[b];
}

}  // namespace detail

/// C^1 periodic data on [-K, K) matching the profile on [-M, M] and swapping
/// the far fields across a quintic blend of the Riemann invariants centered
/// at the seam.
inline void blend_to_torus(const PressureLaw& law, const LineProfile& profile,
                           const ExtensionSpec& spec, const TorusGrid& grid, ScalarCells& r0,
                           ScalarCells& u0) {
    spec.validate();
    const double M = spec.far_radius;
    const double K = spec.torus_half_length;
    const double W = spec.blend_width;
    const int n = grid.cells[0];
    if (std::abs(grid.half_period[0] - K) > 1e-12)
        throw std::invalid_argument("grid half-period must equal K");

    auto [wr_m, wr_p] = riemann_invariants(law, profile.r(M + 1.0), profile.u(M + 1.0));
    auto [wl_m, wl_p] = riemann_invariants(law, profile.r(-M - 1.0), profile.u(-M - 1.0));

    r0.resize(n);
    u0.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = grid.center(0, i);
        if (std::abs(x) <= M) {
            r0[i] = profile.r(x);
            u0[i] = profile.u(x);
            continue;
        }
        // arc coordinate from x = M through the seam to x = -M
        double s_arc = x > 0.0 ? x - M : (K - M) + (x + K);
        double blend_lo = (K - M) - 0.5 * W;
        double t = detail::smoothstep5((s_arc - blend_lo) / W);
        double wm = wr_m + t * (wl_m - wr_m);
        double wp = wr_p + t * (wl_p - wr_p);
        auto [rr, uu] = state_from_invariants(law, wm, wp);
        r0[i] = rr;
        u0[i] = uu;
    }
}

/// Short-time classical solve by characteristic tracing of the Riemann
/// invariants: w-+ is constant along dx/dt = u -+ c, feet located by a
/// fixed-point iteration with midpoint slopes (<= 50 iterations, 1e-12).
/// Characteristic crossing shrinks the horizon and retries; below
/// epsilon_min the construction fails.
inline ClassicalSolution classical_solve(const TorusGrid& grid, const PressureLaw& law,
                                         const ScalarCells& r0, const ScalarCells& u0,
                                         double epsilon0, double epsilon_min, int n_stamps) {
    const int n = grid.cells[0];
    const double K = grid.half_period[0];
    std::vector<double> wm0(n), wp0(n);
    for (int i = 0; i < n; ++i) {
        auto [wm, wp] = riemann_invariants(law, r0[i], u0[i]);
        wm0[i] = wm;
        wp0[i] = wp;
    }
    auto lambda_at0 = [&](double x, int sign) {
        double wm = detail::sample_periodic(wm0, x, K);
        double wp = detail::sample_periodic(wp0, x, K);
        double u = 0.5 * (wm + wp);
        double c = 0.25 * (law.gamma - 1.0) * (wp - wm);
        return sign > 0 ? u + c : u - c;
    };

    double eps = epsilon0;
    while (true) {
        ClassicalSolution sol;
        sol.grid = grid;
        sol.law = law;
        sol.epsilon = eps;
        bool crossed = false;

        for (int k = 0; k < n_stamps && !crossed; ++k) {
            double t = eps * k / (n_stamps - 1);
            ScalarCells r(n), u(n);
            std::vector<double> foot_p(n), foot_m(n);
            for (int i = 0; i < n && !crossed; ++i) {
                double x = grid.center(0, i);
                double wm = wm0[i], wp = wp0[i];
                double fp = x, fm = x;
                bool converged = t == 0.0;
                for (int it = 0; it < 50 && !converged; ++it) {
                    double uu = 0.5 * (wm + wp);
                    double cc = 0.25 * (law.gamma - 1.0) * (wp - wm);
                    double fp_new = x - t * 0.5 * ((uu + cc) + lambda_at0(fp, +1));
                    double fm_new = x - t * 0.5 * ((uu - cc) + lambda_at0(fm, -1));
                    double wp_new = detail::sample_periodic(wp0, fp_new, K);
                    double wm_new = detail::sample_periodic(wm0, fm_new, K);
                    double delta = std::abs(wp_new - wp) + std::abs(wm_new - wm) +
                                   std::abs(fp_new - fp) + std::abs(fm_new - fm);
                    wp = wp_new;
                    wm = wm_new;
                    fp = fp_new;
                    fm = fm_new;
                    converged = delta < 1e-12;
                }
                if (!converged || wp <= wm) {
                    crossed = true;
                    break;
                }
                auto [rr, uu] = state_from_invariants(law, wm, wp);
                r[i] = rr;
                u[i] = uu;
                foot_p[i] = fp;
                foot_m[i] = fm;
            }
            if (crossed) break;
            // feet of one family must stay ordered (no characteristic crossing),
            // including across the periodic seam
            for (int i = 0; i + 1 < n; ++i) {
                if (foot_p[i + 1] - foot_p[i] < -1e-12) crossed = true;
                if (foot_m[i + 1] - foot_m[i] < -1e-12) crossed = true;
            }
            if (n > 1 && ((foot_p[0] + 2.0 * K) - foot_p[n - 1] < -1e-12 ||
                          (foot_m[0] + 2.0 * K) - foot_m[n - 1] < -1e-12))
                crossed = true;
            sol.stamps.push_back(t);
            sol.r.push_back(std::move(r));
            sol.u.push_back(std::move(u));
        }
        if (!crossed) return sol;
        eps *= 0.5;
        if (eps < epsilon_min)
            throw CharacteristicCrossing("short-time horizon shrank below epsilon_min");
    }
}

/// Full construction: blend, short-time classical solve, and the rescaling
/// r_hat(t, x) = r^eps(t eps/T, x eps/T) onto the enlarged torus, valid for
/// t in [0, T].
inline ExtensionResult extend_to_torus(const PressureLaw& law, const LineProfile& profile,
                                       const ExtensionSpec& spec, int n_cells,
                                       int n_stamps = 33) {
    spec.validate();
    TorusGrid grid = TorusGrid::line(n_cells, spec.torus_half_length);
    ExtensionResult out;
    blend_to_torus(law, profile, spec, grid, out.r0, out.u0);

    // initial horizon from the Lipschitz scale of the characteristic speeds
    double lip = 0.0;
    for (int i = 0; i < n_cells; ++i) {
        int j = (i + 1) % n_cells;
        auto [wm_i, wp_i] = riemann_invariants(law, out.r0[i], out.u0[i]);
        auto [wm_j, wp_j] = riemann_invariants(law, out.r0[j], out.u0[j]);
        lip = std::max(lip, std::abs(wp_j - wp_i) / grid.spacing(0));
        lip = std::max(lip, std::abs(wm_j - wm_i) / grid.spacing(0));
    }
    double eps0 = lip > 0.0 ? 0.25 / lip : 0.25 * spec.target_time;

    out.short_time =
        classical_solve(grid, law, out.r0, out.u0, eps0, spec.epsilon_min, n_stamps);
    out.scale = spec.target_time / out.short_time.epsilon;

    // rescaling: same samples, stretched time stamps and torus
    ReferencePair& ref = out.rescaled;
    ref.grid = TorusGrid::line(n_cells, spec.torus_half_length * out.scale);
    ref.law = law;
    double rlo = 1e300, rhi = 0.0, umax = 0.0;
    for (std::size_t k = 0; k < out.short_time.stamps.size(); ++k) {
        ref.stamps.push_back(out.short_time.stamps[k] * out.scale);
        ref.r.push_back(out.short_time.r[k]);
        VectorCells U{};
        U[0] = out.short_time.u[k];
        ref.U.push_back(std::move(U));
        for (double v : out.short_time.r[k]) {
            rlo = std::min(rlo, v);
            rhi = std::max(rhi, v);
        }
        for (double v : out.short_time.u[k]) umax = std::max(umax, std::abs(v));
    }
    ref.r_lo = rlo;
    ref.r_hi = rhi;
    ref.u_max = umax;
    ref.alpha = 0.6;
    ref.p = 8.0;
    ref.delta = 0.0;
    return out;
}

/// Largest disagreement between the one-sided finite-difference derivatives
/// over the whole periodic field: O(h) for C^1 data, O(1) at a kink, O(1/h)
/// at a jump.
inline double seam_derivative_jump(const TorusGrid& grid, const ScalarCells& v) {
    const int n = grid.cells[0];
    const double h = grid.spacing(0);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        int im = (i - 1 + n) % n;
        int ip = (i + 1) % n;
        double left = (v[i] - v[im]) / h;
        double right = (v[ip] - v[i]) / h;
        worst = std::max(worst, std::abs(right - left));
    }
    return worst;
}

}  // namespace erl
