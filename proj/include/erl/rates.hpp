#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "erl/besov.hpp"
#include "erl/mollifier.hpp"
#include "erl/sampled_field.hpp"

namespace erl {

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r_squared = 1.0;
    int points = 0;
};

/// Least-squares fit of log(value) against log(eps). Non-positive values are
/// skipped; fewer than 3 usable points is an error.
inline LogLogFit fit_loglog(std::span<const double> eps, std::span<const double> values) {
    if (eps.size() != values.size()) throw std::invalid_argument("fit: size mismatch");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < eps.size(); ++i)
        if (values[i] > 0.0 && eps[i] > 0.0) {
            x.push_back(std::log(eps[i]));
            y.push_back(std::log(values[i]));
        }
    const int n = static_cast<int>(x.size());
    if (n < 3) throw std::invalid_argument("fit needs at least 3 usable points");
    double sx = 0, sy = 0;
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LogLogFit fit;
    fit.points = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0, ss_tot = 0;
    for (int i = 0; i < n; ++i) {
        double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
        ss_tot += (y[i] - my) * (y[i] - my);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    if (n > 2) fit.slope_stderr = std::sqrt(ss_res / (n - 2) / sxx);
    return fit;
}

/// Truncated Weierstrass-type series sum_{k=0}^{k_max} 2^{-alpha k} cos(2^k pi x):
/// a deterministic rough field with Hoelder exponent alpha above its finest scale.
inline double weierstrass(double x, double alpha, int k_max = 8) {
    double v = 0.0;
    for (int k = 0; k <= k_max; ++k)
        v += std::pow(2.0, -alpha * k) * std::cos(std::pow(2.0, k) * std::numbers::pi * x);
    return v;
}

inline SampledField weierstrass_field_1d(int n, double alpha, double half_period = 1.0,
                                         int k_max = 8) {
    SampledField f(std::vector<FieldAxis>{
        {n, 2.0 * half_period / n, -half_period + half_period / n, true}});
    for (int i = 0; i < n; ++i) f.data()[i] = weierstrass(f.coordinate(0, i), alpha, k_max);
    return f;
}

/// Tensor product of 1-D Weierstrass profiles per axis.
inline SampledField weierstrass_field(const std::vector<FieldAxis>& axes, double alpha,
                                      int k_max = 8) {
    SampledField f(axes);
    IndexBox::full(f).for_each([&](const std::array<int, 4>& idx) {
        double v = 1.0;
        for (int a = 0; a < f.dims(); ++a) v *= weierstrass(f.coordinate(a, idx[a]), alpha, k_max);
        f.at(idx) = v;
    });
    return f;
}

struct RateTable {
    std::vector<double> eps;
    std::vector<double> mollification_error;  // ||[v]_e - v||_p
    std::vector<double> gradient_norm;        // ||grad [v]_e||_p
    std::optional<LogLogFit> s4, s5;
    bool exact = false;  // every mollification error vanished (constants)
};

/// Log-log slopes of the mollification error and of the mollified-gradient
/// blow-up over a dyadic epsilon list (>= 5 entries). Norms are taken on the
/// common interior window of the largest scale so all levels share a domain.
inline RateTable rate_p4_p5(const SampledField& v, double p,
                            std::span<const double> eps_list) {
    if (eps_list.size() < 5) throw std::invalid_argument("rate study needs >= 5 epsilons");
    RateTable table;
    double eps_max = 0.0;
    for (double e : eps_list) eps_max = std::max(eps_max, e);
    Mollifier coarse(eps_max, [&] {
        std::vector<FieldAxis> axes;
        for (int a = 0; a < v.dims(); ++a) axes.push_back(v.axis(a));
        return axes;
    }());
    std::array<int, 4> margin{0, 0, 0, 0};
    for (int a = 0; a < v.dims(); ++a)
        if (!v.axis(a).periodic) margin[a] = coarse.radius(a);

    for (double eps : eps_list) {
        auto res = mollify_with_derivatives(v, make_mollifier(v, eps));
        // win: common window expressed in the output's own index space
        auto window_of = [&](const SampledField& out) {
            IndexBox b = IndexBox::full(out);
            for (int a = 0; a < v.dims(); ++a)
                if (!v.axis(a).periodic) {
                    int shift = static_cast<int>(
                        std::lround((out.axis(a).origin - v.axis(a).origin) / v.axis(a).spacing));
                    b.lo[a] = margin[a] - shift;
                    b.hi[a] = (v.axis(a).n - margin[a]) - shift;
                }
            return b;
        };
        IndexBox win = window_of(res.value);
        double err_sum = 0.0;
        double meas = res.value.cell_measure();
        win.for_each([&](const std::array<int, 4>& idx) {
            std::array<int, 4> src = idx;
            for (int a = 0; a < v.dims(); ++a)
                if (!v.axis(a).periodic)
                    src[a] += static_cast<int>(std::lround(
                        (res.value.axis(a).origin - v.axis(a).origin) / v.axis(a).spacing));
            err_sum += std::pow(std::abs(res.value.at(idx) - v.at(src)), p);
        });
        table.mollification_error.push_back(std::pow(err_sum * meas, 1.0 / p));

        double grad_sum = 0.0;
        win.for_each([&](const std::array<int, 4>& idx) {
            double g2 = 0.0;
            for (int a = 0; a < v.dims(); ++a) {
                double d = res.derivative[a].at(idx);
                g2 += d * d;
            }
            grad_sum += std::pow(std::sqrt(g2), p);
        });
        table.gradient_norm.push_back(std::pow(grad_sum * meas, 1.0 / p));
        table.eps.push_back(eps);
    }

    bool all_zero = true;
    for (double e : table.mollification_error) all_zero = all_zero && e <= 1e-14;
    table.exact = all_zero;
    if (!table.exact) table.s4 = fit_loglog(table.eps, table.mollification_error);
    table.s5 = fit_loglog(table.eps, table.gradient_norm);
    return table;
}

/// Twice continuously differentiable scalar map with derivatives and an open
/// domain (lo, hi) that must contain the range of the field it composes with.
struct ScalarMap {
    std::function<double(double)> g, dg, d2g;
    double domain_lo = -1e300;
    double domain_hi = 1e300;

    void require_in_domain(double v) const {
        if (!(v > domain_lo && v < domain_hi))
            throw std::domain_error("field range escapes the domain of G");
    }
};

inline ScalarMap square_map() {
    return {[](double v) { return v * v; }, [](double v) { return 2.0 * v; },
            [](double) { return 2.0; }};
}

inline ScalarMap cube_map() {
    return {[](double v) { return v * v * v; }, [](double v) { return 3.0 * v * v; },
            [](double v) { return 6.0 * v; }};
}

struct CommutatorFields {
    std::array<SampledField, 4> full;       // grad G([V]) - grad [G(V)], per axis
    std::array<SampledField, 4> piece_gp;   // (G'([V]) - G'(V)) grad [V]
    std::array<SampledField, 4> piece_rem;  // G'(V) grad [V] - grad [G(V)]
    double norm_full = 0.0;                 // L^{p/2} of the gradient magnitude
    double norm_piece_gp = 0.0;
    double norm_piece_rem = 0.0;
    IndexBox window;  // where the norms were taken (interior of the output)
};

/// The mollification commutator grad G([V]_e) - grad [G(V)]_e together with
/// its two decomposition pieces; the pieces sum to the full commutator as an
/// algebraic identity. Norms are L^{p/2} of the pointwise gradient magnitude.
inline CommutatorFields commutator(const ScalarMap& map, const SampledField& v,
                                   const Mollifier& mol, double p) {
    for (double val : v.data()) map.require_in_domain(val);

    SampledField gv(v);
    {
        std::vector<FieldAxis> axes;
        for (int a = 0; a < v.dims(); ++a) axes.push_back(v.axis(a));
        gv = SampledField(axes);
        for (std::size_t i = 0; i < v.size(); ++i) gv.data()[i] = map.g(v.data()[i]);
    }
    auto mv = mollify_with_derivatives(v, mol);
    auto mgv = mollify_with_derivatives(gv, mol);
    for (double val : mv.value.data()) map.require_in_domain(val);

    const int d = v.dims();
    CommutatorFields out;
    std::vector<FieldAxis> axes;
    for (int a = 0; a < d; ++a) axes.push_back(mv.value.axis(a));
    for (int a = 0; a < d; ++a) {
        out.full[a] = SampledField(axes);
        out.piece_gp[a] = SampledField(axes);
        out.piece_rem[a] = SampledField(axes);
    }

    // V itself restricted to the (possibly shrunk) output lattice
    auto v_at_out = [&](const std::array<int, 4>& idx) {
        std::array<int, 4> src = idx;
        for (int a = 0; a < d; ++a)
            if (!v.axis(a).periodic)
                src[a] += static_cast<int>(std::lround(
                    (mv.value.axis(a).origin - v.axis(a).origin) / v.axis(a).spacing));
        return v.at(src);
    };

    IndexBox box = IndexBox::full(mv.value);
    box.for_each([&](const std::array<int, 4>& idx) {
        double vm = mv.value.at(idx);
        double vr = v_at_out(idx);
        double gp_m = map.dg(vm);
        double gp_r = map.dg(vr);
        std::size_t l = mv.value.lin(idx);
        for (int a = 0; a < d; ++a) {
            double dv = mv.derivative[a].data()[l];
            double full = gp_m * dv - mgv.derivative[a].data()[l];
            double p1 = (gp_m - gp_r) * dv;
            out.full[a].data()[l] = full;
            out.piece_gp[a].data()[l] = p1;
            out.piece_rem[a].data()[l] = full - p1;  // = G'(V) grad[V] - grad[G(V)]
        }
    });

    auto magnitude_norm = [&](const std::array<SampledField, 4>& comp) {
        double sum = 0.0;
        double q = 0.5 * p;
        box.for_each([&](const std::array<int, 4>& idx) {
            double g2 = 0.0;
            for (int a = 0; a < d; ++a) {
                double c = comp[a].at(idx);
                g2 += c * c;
            }
            sum += std::pow(std::sqrt(g2), q);
        });
        return std::pow(sum * mv.value.cell_measure(), 1.0 / q);
    };
    out.norm_full = magnitude_norm(out.full);
    out.norm_piece_gp = magnitude_norm(out.piece_gp);
    out.norm_piece_rem = magnitude_norm(out.piece_rem);
    out.window = box;
    return out;
}

struct CommutatorRateTable {
    std::vector<double> eps;
    std::vector<double> norms;
    std::vector<double> implied_constant;  // norm / eps^(2 alpha - 1)
    LogLogFit fit;
    double constant_spread = 0.0;  // max / min of implied constants
};

/// Commutator norms over a dyadic epsilon list with the fitted log-log slope
/// and the per-epsilon constants implied by the eps^(2 alpha - 1) scaling.
inline CommutatorRateTable commutator_rate(const ScalarMap& map, const SampledField& v,
                                           double alpha, double p,
                                           std::span<const double> eps_list) {
    if (eps_list.size() < 3) throw std::invalid_argument("commutator rate needs >= 3 epsilons");
    CommutatorRateTable table;
    for (double eps : eps_list) {
        auto c = commutator(map, v, make_mollifier(v, eps), p);
        table.eps.push_back(eps);
        table.norms.push_back(c.norm_full);
        table.implied_constant.push_back(c.norm_full / std::pow(eps, 2.0 * alpha - 1.0));
    }
    table.fit = fit_loglog(table.eps, table.norms);
    double cmin = 1e300, cmax = 0.0;
    for (double c : table.implied_constant) {
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
    }
    table.constant_spread = cmin > 0.0 ? cmax / cmin : 0.0;
    return table;
}

}  // namespace erl
