#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "erl/errors.hpp"
#include "erl/pressure.hpp"

namespace erl {

struct RiemannData {
    double rho_l, u_l, rho_r, u_r;

    RiemannData(double rl, double ul, double rr, double ur)
        : rho_l(rl), u_l(ul), rho_r(rr), u_r(ur) {
        if (rho_l <= 0.0 || rho_r <= 0.0)
            throw std::invalid_argument("Riemann data requires positive densities");
    }
};

/// w-+ = u -+ 2 c(rho) / (gamma - 1).
inline std::pair<double, double> riemann_invariants(const PressureLaw& law, double rho, double u) {
    if (rho <= 0.0) throw std::domain_error("Riemann invariants need rho > 0");
    double ell = 2.0 * law.sound_speed(rho) / (law.gamma - 1.0);
    return {u - ell, u + ell};
}

/// Inverse map: recover (rho, u) from (w_minus, w_plus). Requires w_plus > w_minus.
inline std::pair<double, double> state_from_invariants(const PressureLaw& law, double w_minus,
                                                       double w_plus) {
    if (w_plus <= w_minus) throw std::domain_error("invariants describe vacuum or negative sound speed");
    double u = 0.5 * (w_plus + w_minus);
    double c = 0.25 * (law.gamma - 1.0) * (w_plus - w_minus);
    double rho = std::pow(c * c / (law.a * law.gamma), 1.0 / (law.gamma - 1.0));
    return {rho, u};
}

enum class WaveKind { none, rarefaction, shock };

struct Wave {
    WaveKind kind = WaveKind::none;
    double head = 0.0;  // leftmost speed of the wave
    double tail = 0.0;  // rightmost speed (== head for shocks)
};

struct WaveStructure {
    PressureLaw law;
    RiemannData data;
    double rho_star, u_star;
    Wave w1, w2;  // 1-family (left), 2-family (right)
};

namespace detail {

/// Velocity drop across a k-wave connecting rho_k to rho_star:
/// rarefaction branch for rho_star <= rho_k, Hugoniot branch above.
inline double wave_velocity_gap(const PressureLaw& law, double rho_star, double rho_k) {
    if (rho_star <= rho_k)
        return 2.0 * (law.sound_speed(rho_star) - law.sound_speed(rho_k)) / (law.gamma - 1.0);
    double dp = law.pressure(rho_star) - law.pressure(rho_k);
    double dr = rho_star - rho_k;
    return std::sqrt(dp * dr / (rho_star * rho_k));
}

}  // namespace detail

/// Exact middle state and wave kinds. Monotone bisection on the wave-curve
/// matching function; vacuum-forming data is rejected.
inline WaveStructure solve_riemann(const PressureLaw& law, const RiemannData& data) {
    auto [wml, wpl] = riemann_invariants(law, data.rho_l, data.u_l);
    auto [wmr, wpr] = riemann_invariants(law, data.rho_r, data.u_r);
    // The two wave curves meet at positive density iff w_plus(L) > w_minus(R).
    if (wpl <= wmr) throw VacuumFormation("Riemann data opens a vacuum region");

    auto mismatch = [&](double rho_star) {
        double ul_star = data.u_l - detail::wave_velocity_gap(law, rho_star, data.rho_l);
        double ur_star = data.u_r + detail::wave_velocity_gap(law, rho_star, data.rho_r);
        return ul_star - ur_star;  // strictly decreasing in rho_star
    };

    double lo = 1e-14;
    double hi = std::max(data.rho_l, data.rho_r);
    while (mismatch(hi) > 0.0) hi *= 2.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, hi); ++it) {
        double mid = 0.5 * (lo + hi);
        (mismatch(mid) > 0.0 ? lo : hi) = mid;
    }
    double rho_star = 0.5 * (lo + hi);
    if (rho_star <= 1e-12) throw VacuumFormation("middle density collapsed to vacuum");
    double u_star = 0.5 * ((data.u_l - detail::wave_velocity_gap(law, rho_star, data.rho_l)) +
                           (data.u_r + detail::wave_velocity_gap(law, rho_star, data.rho_r)));

    WaveStructure ws{law, data, rho_star, u_star, {}, {}};
    const double tol = 1e-11 * std::max({1.0, data.rho_l, data.rho_r});
    double c_star = law.sound_speed(rho_star);

    if (std::abs(rho_star - data.rho_l) <= tol && std::abs(u_star - data.u_l) <= 1e-11) {
        ws.w1.kind = WaveKind::none;
    } else if (rho_star < data.rho_l) {
        ws.w1 = {WaveKind::rarefaction, data.u_l - law.sound_speed(data.rho_l), u_star - c_star};
    } else {
        double s = (rho_star * u_star - data.rho_l * data.u_l) / (rho_star - data.rho_l);
        ws.w1 = {WaveKind::shock, s, s};
    }
    if (std::abs(rho_star - data.rho_r) <= tol && std::abs(u_star - data.u_r) <= 1e-11) {
        ws.w2.kind = WaveKind::none;
    } else if (rho_star < data.rho_r) {
        ws.w2 = {WaveKind::rarefaction, u_star + c_star, data.u_r + law.sound_speed(data.rho_r)};
    } else {
        double s = (data.rho_r * data.u_r - rho_star * u_star) / (data.rho_r - rho_star);
        ws.w2 = {WaveKind::shock, s, s};
    }
    return ws;
}

/// Self-similar state (rho, u) at speed xi = x / t, t > 0. Outside the wave
/// fan this reproduces the left/right data exactly.
inline std::pair<double, double> sample(const WaveStructure& ws, double xi) {
    const PressureLaw& law = ws.law;
    const double g = law.gamma;

    if (ws.w1.kind != WaveKind::none && xi <= ws.w1.head) return {ws.data.rho_l, ws.data.u_l};
    if (ws.w1.kind == WaveKind::rarefaction && xi < ws.w1.tail) {
        // inside the 1-fan: u - c = xi and u + 2c/(g-1) matches the left state
        double wpl = riemann_invariants(law, ws.data.rho_l, ws.data.u_l).second;
        double c = (wpl - xi) * (g - 1.0) / (g + 1.0);
        double rho = std::pow(c * c / (law.a * g), 1.0 / (g - 1.0));
        return {rho, xi + c};
    }
    if (ws.w2.kind != WaveKind::none && xi >= ws.w2.tail) return {ws.data.rho_r, ws.data.u_r};
    if (ws.w2.kind == WaveKind::rarefaction && xi > ws.w2.head) {
        double wmr = riemann_invariants(law, ws.data.rho_r, ws.data.u_r).first;
        double c = (xi - wmr) * (g - 1.0) / (g + 1.0);
        double rho = std::pow(c * c / (law.a * g), 1.0 / (g - 1.0));
        return {rho, xi - c};
    }
    if (ws.w1.kind == WaveKind::none && ws.w2.kind == WaveKind::none)
        return {ws.data.rho_l, ws.data.u_l};
    return {ws.rho_star, ws.u_star};
}

/// Rankine-Hugoniot residuals max(|s [rho] - [m]|, |s [m] - [m^2/rho + p]|)
/// across the k-th wave; 0 for exact shocks.
inline double rankine_hugoniot_residual(const WaveStructure& ws, int family) {
    const Wave& w = family == 1 ? ws.w1 : ws.w2;
    if (w.kind != WaveKind::shock) return 0.0;
    double rho_a, u_a, rho_b, u_b;
    if (family == 1) {
        rho_a = ws.data.rho_l;
        u_a = ws.data.u_l;
        rho_b = ws.rho_star;
        u_b = ws.u_star;
    } else {
        rho_a = ws.rho_star;
        u_a = ws.u_star;
        rho_b = ws.data.rho_r;
        u_b = ws.data.u_r;
    }
    double ma = rho_a * u_a, mb = rho_b * u_b;
    double fa = ma * u_a + ws.law.pressure(rho_a);
    double fb = mb * u_b + ws.law.pressure(rho_b);
    double r1 = w.head * (rho_b - rho_a) - (mb - ma);
    double r2 = w.head * (mb - ma) - (fb - fa);
    return std::max(std::abs(r1), std::abs(r2));
}

/// Lax inequalities for a k-shock; returns the minimum slack (positive for
/// strictly admissible shocks).
inline double lax_admissibility_slack(const WaveStructure& ws, int family) {
    const Wave& w = family == 1 ? ws.w1 : ws.w2;
    if (w.kind != WaveKind::shock) return 0.0;
    const PressureLaw& law = ws.law;
    if (family == 1) {
        double lam_l = ws.data.u_l - law.sound_speed(ws.data.rho_l);
        double lam_s = ws.u_star - law.sound_speed(ws.rho_star);
        return std::min(lam_l - w.head, w.head - lam_s);
    }
    double lam_s = ws.u_star + law.sound_speed(ws.rho_star);
    double lam_r = ws.data.u_r + law.sound_speed(ws.data.rho_r);
    return std::min(lam_s - w.head, w.head - lam_r);
}

}  // namespace erl
